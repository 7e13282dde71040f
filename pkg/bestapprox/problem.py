""" Problem files: a JSON description of (A, B, ‖·‖) plus solver and oracle settings

    {
        "name": "rectangle_ellipse_euclidean",
        "dimension": 2,
        "norm": {"p": 2},
        "set_a": {"type": "box", "lo": [-2, -2], "hi": [2, 0]},
        "set_b": {"type": "ellipsoid", "center": [0, 2], "semiaxes": [2, 1]},
        "solver": {"tol": 1e-10, "max_iter": 10000, "starts": 8},
        "oracle": {"bbox": {"lo": [-2.5, -2.5], "hi": [2.5, 3.5]}, "resolution": 0.01},
        "outputs": ["report", "plotdata"]
    }

`set_a` and `set_b` are either one set or a list of sets, the list standing for their intersection.
`"p": "inf"` is the ℓ∞ norm.

Set types:

* halfspace:    normal, offset
* box:          lo, hi
* norm_ball:    center, radius, norm (optional, {"p": ...})
* ellipsoid:    center, semiaxes
* polytope:     halfspaces (a list of {normal, offset})
* affine:       point, basis (a list of vectors)
* segment:      a0, a1
* intersection: parts
* cylinder:     crosssection (a norm_ball or an ellipsoid), axis_point, axis_dir, extent (optional [t_lo, t_hi])
* voronoi:      sites, competitor
* sublevel:     function, level. The function is
                {"kind": "affine", "linear", "offset"},
                {"kind": "quadratic", "Q", "linear", "offset"}, or
                {"kind": "exp", "index", "scale", "linear", "offset"}

parse_problem() reports every problem it finds at once, each with a dotted path: `set_b.radius`.
"""
import json
from dataclasses import dataclass, fields, replace
from functools import singledispatch
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from .exc import BestApproxError, InvalidSetError, ProblemSchemaError, SchemaIssue
from .functions import ConvexFunction, AffineFunction, QuadraticFunction, ExpFunction
from .geometry import NormSpec, Segment
from .oracle import OracleConfig
from .sets import (SetExpr, Halfspace, Box, NormBall, Ellipsoid, PolytopeH, AffineSubspace, SegmentSet,
                   Intersection, Cylinder, VoronoiCell, SublevelSet)
from .solvers import SolverParams, StepSchedule, StepKind

SetSide = Union[SetExpr, Tuple[SetExpr, ...]]

OUTPUTS = ('report', 'plotdata')

DEFAULT_STARTS = 8

_TOP_LEVEL_KEYS = {'name', 'dimension', 'norm', 'set_a', 'set_b', 'solver', 'oracle', 'outputs'}


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """ A parsed problem file

    Attributes:
        dimension: The ambient dimension n
        norm: The problem norm
        set_a, set_b: One set, or a tuple of sets standing for their intersection
        solver: Solver settings
        starts: Number of multistart runs
        oracle: Grid settings, when the oracle is wanted
        outputs: 'report' and/or 'plotdata'
        name: A label for reports
    """
    dimension: int
    norm: NormSpec
    set_a: SetSide
    set_b: SetSide
    solver: SolverParams = SolverParams()
    starts: int = DEFAULT_STARTS
    oracle: Optional[OracleConfig] = None
    outputs: Tuple[str, ...] = ('report',)
    name: str = ''

    @property
    def A_parts(self) -> List[SetExpr]:
        return list(self.set_a) if isinstance(self.set_a, tuple) else [self.set_a]

    @property
    def B_parts(self) -> List[SetExpr]:
        return list(self.set_b) if isinstance(self.set_b, tuple) else [self.set_b]

    @property
    def A(self) -> SetExpr:
        return _as_one_set(self.set_a)

    @property
    def B(self) -> SetExpr:
        return _as_one_set(self.set_b)

    @property
    def uses_parts(self) -> bool:
        """ Is either side given as a list of parts? """
        return isinstance(self.set_a, tuple) or isinstance(self.set_b, tuple)

    def with_overrides(self, seed: Optional[int] = None, starts: Optional[int] = None,
                       resolution: Optional[float] = None) -> 'ProblemSpec':
        """ A copy with the command-line overrides applied """
        spec = self
        if seed is not None:
            spec = replace(spec, solver=replace(spec.solver, seed=seed))
        if starts is not None:
            spec = replace(spec, starts=starts)
        if resolution is not None and spec.oracle is not None:
            spec = replace(spec, oracle=spec.oracle.with_resolution(resolution))
        return spec

    def __eq__(self, other):
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        return dump_problem(self) == dump_problem(other)

    __hash__ = None


def _as_one_set(side: SetSide) -> SetExpr:
    if isinstance(side, tuple):
        return side[0] if len(side) == 1 else Intersection(side)
    return side


# region Parsing

class _Reader:
    """ Walks the JSON tree, building objects and collecting schema issues """

    def __init__(self):
        self.issues: List[SchemaIssue] = []
        self.dimension: Optional[int] = None

    def fail(self, path: str, message: str):
        self.issues.append(SchemaIssue(path, message))
        return None

    def obj(self, node: Any, path: str) -> Optional[dict]:
        if not isinstance(node, dict):
            return self.fail(path, f'expected an object, got {type(node).__name__}')
        return node

    def required(self, node: dict, key: str, path: str, read: Callable[[Any, str], Any]):
        if key not in node:
            return self.fail(_join(path, key), 'missing')
        return read(node[key], _join(path, key))

    def optional(self, node: dict, key: str, path: str, read: Callable[[Any, str], Any], default=None):
        if key not in node:
            return default
        return read(node[key], _join(path, key))

    def number(self, node: Any, path: str) -> Optional[float]:
        if isinstance(node, bool) or not isinstance(node, (int, float)) or not np.isfinite(node):
            return self.fail(path, f'expected a finite number, got {node!r}')
        return float(node)

    def positive(self, node: Any, path: str) -> Optional[float]:
        value = self.number(node, path)
        if value is not None and not value > 0:
            return self.fail(path, f'must be positive, got {value}')
        return value

    def integer(self, node: Any, path: str) -> Optional[int]:
        if isinstance(node, bool) or not isinstance(node, int):
            return self.fail(path, f'expected an integer, got {node!r}')
        return node

    def string(self, node: Any, path: str) -> Optional[str]:
        if not isinstance(node, str):
            return self.fail(path, f'expected a string, got {node!r}')
        return node

    def vector(self, node: Any, path: str) -> Optional[np.ndarray]:
        if not isinstance(node, list) or not node:
            return self.fail(path, 'expected a nonempty list of numbers')
        values = [self.number(x, f'{path}[{i}]') for i, x in enumerate(node)]
        if any(v is None for v in values):
            return None
        if self.dimension is not None and len(values) != self.dimension:
            return self.fail(path, f'dimension mismatch: expected {self.dimension}, got {len(values)}')
        return np.array(values)

    def nonempty_list(self, node: Any, path: str) -> Optional[list]:
        if not isinstance(node, list) or not node:
            return self.fail(path, 'expected a nonempty list')
        return node

    def interval(self, node: Any, path: str) -> Optional[Tuple[float, float]]:
        if not isinstance(node, list) or len(node) != 2:
            return self.fail(path, 'expected [t_lo, t_hi]')
        lo, hi = (self.number(x, f'{path}[{i}]') for i, x in enumerate(node))
        return None if lo is None or hi is None else (lo, hi)

    def vectors(self, node: Any, path: str) -> Optional[List[np.ndarray]]:
        if not isinstance(node, list):
            return self.fail(path, 'expected a list of vectors')
        values = [self.vector(v, f'{path}[{i}]') for i, v in enumerate(node)]
        return None if any(v is None for v in values) else values

    def matrix(self, node: Any, path: str) -> Optional[np.ndarray]:
        rows = self.vectors(node, path)
        if rows is None:
            return None
        if len(rows) != self.dimension:
            return self.fail(path, f'expected {self.dimension} rows, got {len(rows)}')
        return np.array(rows)

    def norm(self, node: Any, path: str) -> Optional[NormSpec]:
        node = self.obj(node, path)
        if node is None:
            return None
        if 'p' not in node:
            return self.fail(_join(path, 'p'), 'missing')
        try:
            return NormSpec.parse(node['p'])
        except BestApproxError as e:
            return self.fail(_join(path, 'p'), str(e))

    def side(self, node: Any, path: str) -> Optional[SetSide]:
        if isinstance(node, list):
            if not node:
                return self.fail(path, 'a list of parts must not be empty')
            parts = [self.set(part, f'{path}[{i}]') for i, part in enumerate(node)]
            return None if any(p is None for p in parts) else tuple(parts)
        return self.set(node, path)

    def set(self, node: Any, path: str) -> Optional[SetExpr]:
        node = self.obj(node, path)
        if node is None:
            return None
        tag = node.get('type')
        build = _SET_READERS.get(tag) if isinstance(tag, str) else None
        if build is None:
            return self.fail(_join(path, 'type'), f'unknown set type {tag!r}; expected one of {sorted(_SET_READERS)}')
        before = len(self.issues)
        args = build(self, node, path)
        if args is None or len(self.issues) > before:
            return None
        cls, kwargs = args
        try:
            return cls(**kwargs)
        except InvalidSetError as e:
            return self.fail(_join(path, e.field), e.reason)
        except BestApproxError as e:
            return self.fail(path, str(e))

    def function(self, node: Any, path: str) -> Optional[ConvexFunction]:
        node = self.obj(node, path)
        if node is None:
            return None
        kind = node.get('kind')
        r = self
        try:
            if kind == 'affine':
                linear = r.required(node, 'linear', path, r.vector)
                offset = r.optional(node, 'offset', path, r.number, 0.0)
                return None if linear is None or offset is None else AffineFunction(linear, offset)
            if kind == 'quadratic':
                Q = r.required(node, 'Q', path, r.matrix)
                linear = r.required(node, 'linear', path, r.vector)
                offset = r.optional(node, 'offset', path, r.number, 0.0)
                return None if Q is None or linear is None or offset is None else QuadraticFunction(Q, linear, offset)
            if kind == 'exp':
                index = r.required(node, 'index', path, r.integer)
                scale = r.optional(node, 'scale', path, r.positive, 1.0)
                linear = r.required(node, 'linear', path, r.vector)
                offset = r.optional(node, 'offset', path, r.number, 0.0)
                if None in (index, scale, offset) or linear is None:
                    return None
                return ExpFunction(index, scale, linear, offset)
        except InvalidSetError as e:
            return self.fail(_join(path, e.field), e.reason)
        return self.fail(_join(path, 'kind'), f'unknown function kind {kind!r}; expected affine, quadratic or exp')

    def solver(self, node: Any, path: str) -> Tuple[Optional[SolverParams], Optional[int]]:
        node = self.obj(node, path)
        if node is None:
            return None, None
        known = {f.name for f in fields(SolverParams)} | {'starts'}
        for key in sorted(set(node) - known):
            self.fail(_join(path, key), 'unknown solver setting')
        kwargs = {}
        for key, read in (('tol', self.positive), ('max_iter', self.integer), ('blowup_radius', self.positive),
                          ('seed', self.integer), ('inner_max_iter', self.integer), ('window', self.integer)):
            if key in node:
                kwargs[key] = read(node[key], _join(path, key))
        if 'step_schedule' in node:
            kwargs['step_schedule'] = self.step_schedule(node['step_schedule'], _join(path, 'step_schedule'))
        starts = self.optional(node, 'starts', path, self.integer, DEFAULT_STARTS)
        if starts is not None and starts < 2:
            starts = self.fail(_join(path, 'starts'), f'must be ≥ 2, got {starts}')
        if any(v is None for v in kwargs.values()):
            return None, starts
        try:
            return SolverParams(**kwargs), starts
        except BestApproxError as e:
            return self.fail(path, str(e)), starts

    def step_schedule(self, node: Any, path: str) -> Optional[StepSchedule]:
        node = self.obj(node, path)
        if node is None:
            return None
        kind = node.get('kind', StepKind.DIMINISHING.value)
        if not isinstance(kind, str) or kind not in {k.value for k in StepKind}:
            return self.fail(_join(path, 'kind'), f'expected constant or diminishing, got {kind!r}')
        scale = self.optional(node, 'scale', path, self.positive)
        if 'scale' in node and scale is None:
            return None
        return StepSchedule(StepKind(kind), scale)

    def oracle(self, node: Any, path: str) -> Optional[OracleConfig]:
        node = self.obj(node, path)
        if node is None:
            return None
        bbox = self.required(node, 'bbox', path, self.obj)
        resolution = self.required(node, 'resolution', path, self.positive)
        if bbox is None:
            return None
        lo = self.required(bbox, 'lo', _join(path, 'bbox'), self.vector)
        hi = self.required(bbox, 'hi', _join(path, 'bbox'), self.vector)
        if lo is None or hi is None or resolution is None:
            return None
        if np.any(lo >= hi):
            return self.fail(_join(path, 'bbox'), 'lo must be below hi in every coordinate')
        return OracleConfig((lo, hi), resolution)

    def outputs(self, node: Any, path: str) -> Optional[Tuple[str, ...]]:
        if not isinstance(node, list) or not all(isinstance(x, str) for x in node):
            return self.fail(path, 'expected a list of strings')
        for i, item in enumerate(node):
            if item not in OUTPUTS:
                self.fail(f'{path}[{i}]', f'unknown output {item!r}; expected one of {list(OUTPUTS)}')
        return tuple(node)


def _join(path: str, key: str) -> str:
    return f'{path}.{key}' if path else key


def _read_halfspace(r: _Reader, node, path):
    return Halfspace, dict(normal=r.required(node, 'normal', path, r.vector),
                           offset=r.required(node, 'offset', path, r.number))


def _read_box(r: _Reader, node, path):
    return Box, dict(lo=r.required(node, 'lo', path, r.vector), hi=r.required(node, 'hi', path, r.vector))


def _read_norm_ball(r: _Reader, node, path):
    kwargs = dict(center=r.required(node, 'center', path, r.vector),
                  radius=r.required(node, 'radius', path, r.positive))
    if 'norm' in node:
        kwargs['norm'] = r.norm(node['norm'], _join(path, 'norm'))
    return NormBall, kwargs


def _read_ellipsoid(r: _Reader, node, path):
    return Ellipsoid, dict(center=r.required(node, 'center', path, r.vector),
                           semiaxes=r.required(node, 'semiaxes', path, r.vector))


def _read_polytope(r: _Reader, node, path):
    items = r.required(node, 'halfspaces', path, r.nonempty_list)
    if items is None:
        return None
    halfspaces = []
    for i, item in enumerate(items):
        item_path = f'{_join(path, "halfspaces")}[{i}]'
        item = r.obj(item, item_path)
        if item is None:
            continue
        normal = r.required(item, 'normal', item_path, r.vector)
        offset = r.required(item, 'offset', item_path, r.number)
        if normal is None or offset is None:
            continue
        try:
            halfspaces.append(Halfspace(normal, offset))
        except InvalidSetError as e:
            r.fail(_join(item_path, e.field), e.reason)
    return PolytopeH, dict(halfspaces=tuple(halfspaces))


def _read_affine(r: _Reader, node, path):
    basis = r.optional(node, 'basis', path, r.vectors, [])
    return AffineSubspace, dict(point=r.required(node, 'point', path, r.vector),
                                basis=tuple(basis) if basis is not None else None)


def _read_segment(r: _Reader, node, path):
    a0 = r.required(node, 'a0', path, r.vector)
    a1 = r.required(node, 'a1', path, r.vector)
    if a0 is None or a1 is None:
        return None
    return SegmentSet, dict(seg=Segment(a0, a1))


def _read_intersection(r: _Reader, node, path):
    parts = r.required(node, 'parts', path, r.nonempty_list)
    if parts is None:
        return None
    return Intersection, dict(parts=tuple(r.set(part, f'{_join(path, "parts")}[{i}]') for i, part in enumerate(parts)))


def _read_cylinder(r: _Reader, node, path):
    extent = r.optional(node, 'extent', path, r.interval)
    return Cylinder, dict(crosssection=r.required(node, 'crosssection', path, r.set),
                          axis_point=r.required(node, 'axis_point', path, r.vector),
                          axis_dir=r.required(node, 'axis_dir', path, r.vector),
                          extent=extent)


def _read_voronoi(r: _Reader, node, path):
    sites = r.required(node, 'sites', path, r.vectors)
    return VoronoiCell, dict(sites=tuple(sites) if sites is not None else None,
                             competitor=r.required(node, 'competitor', path, r.set))


def _read_sublevel(r: _Reader, node, path):
    return SublevelSet, dict(function=r.required(node, 'function', path, r.function),
                             level=r.optional(node, 'level', path, r.number, 0.0))


_SET_READERS: Dict[str, Callable] = {
    Halfspace.tag: _read_halfspace,
    Box.tag: _read_box,
    NormBall.tag: _read_norm_ball,
    Ellipsoid.tag: _read_ellipsoid,
    PolytopeH.tag: _read_polytope,
    AffineSubspace.tag: _read_affine,
    SegmentSet.tag: _read_segment,
    Intersection.tag: _read_intersection,
    Cylinder.tag: _read_cylinder,
    VoronoiCell.tag: _read_voronoi,
    SublevelSet.tag: _read_sublevel,
}


def parse_problem(text: str, source: str = None) -> ProblemSpec:
    """ Parse and validate a problem file

    Raises:
        ProblemSchemaError: with every issue found, each with a dotted path
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemSchemaError([SchemaIssue('', f'invalid JSON: {e}')], source)

    r = _Reader()
    document = r.obj(document, '')
    if document is None:
        raise ProblemSchemaError(r.issues, source)
    for key in sorted(set(document) - _TOP_LEVEL_KEYS):
        r.fail(key, 'unknown key')

    dimension = r.required(document, 'dimension', '', r.integer)
    if dimension is not None and dimension < 1:
        dimension = r.fail('dimension', f'must be ≥ 1, got {dimension}')
    r.dimension = dimension
    norm = r.required(document, 'norm', '', r.norm)
    set_a = r.required(document, 'set_a', '', r.side)
    set_b = r.required(document, 'set_b', '', r.side)
    solver, starts = r.solver(document['solver'], 'solver') if 'solver' in document else (SolverParams(), DEFAULT_STARTS)
    oracle = r.optional(document, 'oracle', '', r.oracle)
    outputs = r.optional(document, 'outputs', '', r.outputs, ('report',))
    name = r.optional(document, 'name', '', r.string, '')

    if r.issues:
        raise ProblemSchemaError(r.issues, source)
    return ProblemSpec(dimension=dimension, norm=norm, set_a=set_a, set_b=set_b, solver=solver, starts=starts,
                       oracle=oracle, outputs=outputs, name=name)


def load_problem(path: str) -> ProblemSpec:
    """ Read and parse a problem file

    Raises:
        OSError: the file cannot be read
        ProblemSchemaError: the file is not UTF-8 text, or fails validation
    """
    with open(path, encoding='utf-8') as f:
        try:
            text = f.read()
        except UnicodeDecodeError as e:
            raise ProblemSchemaError([SchemaIssue('', f'not UTF-8 text: {e.reason} at byte {e.start}')], path)
    return parse_problem(text, source=path)

# endregion

# region Printing


def _floats(v) -> list:
    return np.asarray(v, dtype=float).tolist()


@singledispatch
def set_to_dict(s: SetExpr) -> dict:
    """ The problem-file form of a set """
    raise NotImplementedError(type(s).__name__)


@set_to_dict.register
def _(s: Halfspace):
    return {'type': s.tag, 'normal': _floats(s.normal), 'offset': s.offset}


@set_to_dict.register
def _(s: Box):
    return {'type': s.tag, 'lo': _floats(s.lo), 'hi': _floats(s.hi)}


@set_to_dict.register
def _(s: NormBall):
    return {'type': s.tag, 'center': _floats(s.center), 'radius': s.radius, 'norm': {'p': s.norm.serialize()}}


@set_to_dict.register
def _(s: Ellipsoid):
    return {'type': s.tag, 'center': _floats(s.center), 'semiaxes': _floats(s.semiaxes)}


@set_to_dict.register
def _(s: PolytopeH):
    return {'type': s.tag, 'halfspaces': [{'normal': _floats(h.normal), 'offset': h.offset} for h in s.halfspaces]}


@set_to_dict.register
def _(s: AffineSubspace):
    return {'type': s.tag, 'point': _floats(s.point), 'basis': [_floats(v) for v in s.basis]}


@set_to_dict.register
def _(s: SegmentSet):
    return {'type': s.tag, 'a0': _floats(s.seg.a0), 'a1': _floats(s.seg.a1)}


@set_to_dict.register
def _(s: Intersection):
    return {'type': s.tag, 'parts': [set_to_dict(p) for p in s.parts]}


@set_to_dict.register
def _(s: Cylinder):
    d = {'type': s.tag, 'crosssection': set_to_dict(s.crosssection),
         'axis_point': _floats(s.axis_point), 'axis_dir': _floats(s.axis_dir)}
    if s.extent is not None:
        d['extent'] = list(s.extent)
    return d


@set_to_dict.register
def _(s: VoronoiCell):
    return {'type': s.tag, 'sites': [_floats(p) for p in s.sites], 'competitor': set_to_dict(s.competitor)}


@set_to_dict.register
def _(s: SublevelSet):
    return {'type': s.tag, 'function': function_to_dict(s.function), 'level': s.level}


def function_to_dict(f: ConvexFunction) -> dict:
    if isinstance(f, AffineFunction):
        return {'kind': f.kind, 'linear': _floats(f.linear), 'offset': f.offset}
    if isinstance(f, QuadraticFunction):
        return {'kind': f.kind, 'Q': _floats(f.Q), 'linear': _floats(f.linear), 'offset': f.offset}
    if isinstance(f, ExpFunction):
        return {'kind': f.kind, 'index': f.index, 'scale': f.scale, 'linear': _floats(f.linear), 'offset': f.offset}
    raise NotImplementedError(type(f).__name__)


def _side_to_json(side: SetSide):
    if isinstance(side, tuple):
        return [set_to_dict(s) for s in side]
    return set_to_dict(side)


def dump_problem(spec: ProblemSpec) -> dict:
    """ The problem-file form of a spec: parse_problem(json.dumps(dump_problem(spec))) == spec """
    p = spec.solver
    solver = {
        'tol': p.tol,
        'max_iter': p.max_iter,
        'step_schedule': {'kind': p.step_schedule.kind.value, **({'scale': p.step_schedule.scale}
                                                                 if p.step_schedule.scale is not None else {})},
        'blowup_radius': p.blowup_radius,
        'seed': p.seed,
        'inner_max_iter': p.inner_max_iter,
        'window': p.window,
        'starts': spec.starts,
    }
    document = {
        'name': spec.name,
        'dimension': spec.dimension,
        'norm': {'p': spec.norm.serialize()},
        'set_a': _side_to_json(spec.set_a),
        'set_b': _side_to_json(spec.set_b),
        'solver': solver,
        'outputs': list(spec.outputs),
    }
    if spec.oracle is not None:
        lo, hi = spec.oracle.bbox
        document['oracle'] = {'bbox': {'lo': _floats(lo), 'hi': _floats(hi)}, 'resolution': spec.oracle.resolution}
    return document


def print_problem(spec: ProblemSpec) -> str:
    return json.dumps(dump_problem(spec), sort_keys=True, indent=2, ensure_ascii=False)

# endregion
