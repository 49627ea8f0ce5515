"""Kernel entropy component analysis with an optimized rotation."""

from .bandwidth import (
    sigma_class_cv,
    sigma_mean_dist,
    sigma_median15,
    sigma_ml,
    sigma_silverman,
    select_sigma,
)
from .classify import MapClassifier, fit_map, overall_accuracy
from .data import Dataset, add_gaussian_noise, gen_pinwheel, gen_ring, gen_two_moons, load_csv, split
from .kde import DensityEstimate, parzen_pdf, pdf_grid, reduced_pdf
from .keca import EntropyModel, cumulative_ip, entropy_values, fit_keca, information_potential, transform
from .kernel import KernelModel, cross_kernel, kernel_matrix, pairwise_distances
from .rotation import AscentConfig, EntropySource, fit_component, fit_okeca
from .spectral import EigenDecomposition, eig_sym

from .estimators import KECA, OKECA, EntropyMAPClassifier, ReducedRankKDE

__version__ = "0.1.0"
