import json
from exdoc import doc

# Data
import bestapprox
from bestapprox import solvers, certificates, oracle

data = dict(
    module=doc(bestapprox),
    solvers=[
        doc(solvers.alternating_projections),
        doc(solvers.general_norm_descent),
        doc(solvers.simultaneous_projection_solve),
        doc(solvers.multistart_bap),
    ],
    certificates=[
        doc(certificates.certify_uniqueness),
        doc(certificates.certify_existence),
    ],
    oracle=doc(oracle.grid_min_distance),
)

# Document
print(json.dumps(data, indent=2))
