""" Class-level loggers

Classes decorated with @class_logger get a `logger` named after their module and class,
plus cheap guards to skip formatting when a level is disabled:

    @class_logger
    class Solver:
        def run(self):
            if self._should_log_info():
                self.logger.info('%s: started', self)
"""
import logging
from typing import Type, TypeVar

T = TypeVar('T')


def class_logger(cls: Type[T]) -> Type[T]:
    """ Attach a logger named `<module>.<ClassName>` to the class """
    logger = logging.getLogger(f'{cls.__module__}.{cls.__name__}')
    cls.logger = logger
    cls._should_log_debug = lambda self: logger.isEnabledFor(logging.DEBUG)
    cls._should_log_info = lambda self: logger.isEnabledFor(logging.INFO)
    return cls


def configure(quiet: bool = False):
    """ Set up the root logger the way the command line wants it """
    logging.basicConfig(
        level=logging.ERROR if quiet else logging.INFO,
        format='%(asctime)s [%(levelname).1s] %(name)s: %(message)s',
        datefmt='%H:%M:%S',
    )
