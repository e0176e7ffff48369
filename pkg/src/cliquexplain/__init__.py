"""Local surrogate explanations for image classifiers, with perturbations
sampled over cliques of adjacent superpixels instead of uniform bit flips."""

from .classifiers import ClassifierHandle, predict_batch, target_class
from .cliques import Clique, clique_to_mask, enumerate_cliques, uniform_sampler
from .errors import (ExplainError, ImageSizeError, ParameterError, ProtocolError,
                     ShapeError, TransportError, UndefinedRSquaredError)
from .graph import RegionGraph, build_region_graph
from .image_io import decode_image, load_image, save_png
from .metrics import FidelityReport, fidelity_report, mae, r_squared
from .overlay import render_overlay
from .perturb import (KernelParams, kernel_weight, mask_distance, recover_image,
                      segment_mean_colors)
from .pipeline import ExplanationReport, RunConfig, explain, run_explanation
from .segmentation import SegmentationParams, SuperpixelMap, full_mask, segment_image
from .surrogate import (PerturbedDataset, SurrogateModel, build_dataset, k_lasso,
                        surrogate_predict, top_k_segments)

__version__ = "0.1.0"
