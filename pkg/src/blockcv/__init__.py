"""hv-block cross-validation for dependent data, plus a BIBD analyzer."""

from .bibd import (
    BibdReport,
    Design,
    NotBibdCertificate,
    forced_params,
    hv_bibd_candidate,
    hv_design,
    not_bibd_certificate,
    parse_design,
    verify_bibd,
)
from .cv import Candidate, CvResult, SelectionResult, cv_hv, mean_candidate, select_model
from .errors import (
    BadPair,
    BadParameters,
    BlockCVError,
    EvaluatorFailure,
    IllegitimateCenter,
    IndexOutOfRange,
    MalformedDesign,
    NotApplicable,
    RankDeficient,
    TooFewSamples,
)
from .occurrence import (
    OccurrenceProfile,
    count_bruteforce,
    lambda_analytic,
    occurrence_matrix,
    r_analytic,
)
from .splitter import Split, SplitConfig, hv_splits, split_at, validate_config

__version__ = "0.1.0"
