"""Geometric scattering features for graphs, and the analyses built on them."""

__version__ = "0.1.0"

from .graph import Graph, apply_lazy_walk, build_graph, connected_components, normalized_laplacian
from .wavelets import WaveletCoefficients, dyadic_diffusion, wavelet_transform
from .scattering import (
    ScatteringConfig,
    ScatteringFeatures,
    feature_layout,
    moment_summary,
    scatter_graph,
    scatter_signal,
)
from .signals import clustering_coefficient, default_signals, degree_signal, eccentricity
from .datasets import GraphDataset, load_features, load_tu_dataset, save_features
from .embedding import (
    class_distance_matrix,
    ec_preference,
    nearest_subspace_stats,
    pca_fit,
    subspace_distance,
    threshold_dimension,
)
from .svm import KernelSVC, rbf_kernel, svm_predict, svm_train
from .crossval import ExperimentProtocol, nested_cv, reduced_split_study
