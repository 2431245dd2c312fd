MALFORMED_CELL = "Malformed value {value!r} at row {row}, column {column!r}"
RESPONSE_ABSENT = "Response column {column!r} not found in header"
RESPONSE_NOT_BINARY = "Response value {value!r} at row {row} is not 0 or 1"
EMPTY_DATASET = "Dataset needs at least one row and one feature"
SINGLE_CLASS = "Response must contain both defaults and non-defaults"
CANNOT_STRATIFY = "Class {label} has {count} member(s); at least 2 are needed to stratify"
MISSING_CELLS = "Column {column!r} contains missing values; impute or WoE-encode first"
MISSING_COVARIATE = "Covariate {column!r} is not present in the data"
OUTSIDE_SUPPORT = "Linear predictor outside the GEV support (1 + tau * eta <= 0)"
FEW_DISTINCT = "Covariate {column!r} has {count} distinct values; basis of dimension {k} needs at least {k}"
BASIS_TOO_SMALL = "Basis dimension must be at least 4, got {k}"
RANK_DEFICIENT = "Design matrix has rank {rank} < {columns} columns"
NOT_CONVERGED = "P-IRLS did not converge after {iterations} iterations"
STALLED = "P-IRLS stalled at iteration {iteration}: no descent after {halvings} step halvings"
NO_GRID_FIT = "No {parameter} grid point produced a converged fit"
MODEL_NOT_CONVERGED = "Model did not converge; inference is unavailable"
SPEC_MISMATCH = "Models were fitted with different specifications"
UNKNOWN_TERM = "{term!r} is not a smooth term of the model"
FEATURE_ALL_MISSING = "Feature {column!r} has no observed values"
TOO_FEW_OBSERVED = "Feature {column!r} has fewer than 2 observed values"
NO_DEFAULTS = "At least one default is required"
MODEL_NOT_FOUND = "Model not found"
