"""Problem classification from exploratory landscape analysis features."""
from .bbob import ProblemId, evaluate, make_instance
from .classifiers import dt_train, knn_train, mj_train
from .config import ExperimentConfig
from .dataset import FeatureDataset, loio_split, normalize, subsample_split
from .features import FEATURE_NAMES, compute_feature_vector
from .sobol import scale_to_domain, sobol_points
from .validation import enumerate_minimal_portfolios, invariance_report, run_validation

__version__ = "0.1.0"
