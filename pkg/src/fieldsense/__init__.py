"""Form-filling suggestion engine.

Learns field dependencies from historical form submissions (Bayesian
networks plus cluster-local models), ranks candidate values for
categorical fields of a partially filled form, and endorses suggestions
only when they are confident. Ships with baselines and an evaluation
harness.
"""
from .artifact import load_bundle, save_bundle
from .bayesnet import BayesNet, BnConfig, Dag, bic_score, fit_cpts, infer_posterior, learn_structure
from .builder import BuildConfig, ModelBundle, build, independent_fields
from .cluster import ClusterSet, kmodes, select_k
from .errors import DataError, FieldsenseError, PreprocessError, SchemaError, TargetError
from .evaluate import run_benchmark, split_by_time
from .preprocess import PreprocessConfig, PreprocessModel
from .schema import EMPTY, Dataset, FieldSchema, FormSchema, InputInstance, load_dataset, load_schema
from .suggest import Suggestion, SuggestionRequest, suggest

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "BayesNet",
    "BnConfig",
    "BuildConfig",
    "ClusterSet",
    "Dag",
    "DataError",
    "Dataset",
    "FieldSchema",
    "FieldsenseError",
    "FormSchema",
    "InputInstance",
    "ModelBundle",
    "PreprocessConfig",
    "PreprocessError",
    "PreprocessModel",
    "SchemaError",
    "Suggestion",
    "SuggestionRequest",
    "TargetError",
    "bic_score",
    "build",
    "fit_cpts",
    "independent_fields",
    "infer_posterior",
    "kmodes",
    "learn_structure",
    "load_bundle",
    "load_dataset",
    "load_schema",
    "run_benchmark",
    "save_bundle",
    "select_k",
    "split_by_time",
    "suggest",
]
