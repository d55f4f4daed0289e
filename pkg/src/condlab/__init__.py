"""condlab: a numerical laboratory for conditioning and reparameterization.

The package demonstrates, as seeded and self-checking experiments, how
innocuous-looking modelling choices change Bayesian answers:

* conditioning a uniform sphere law on a great circle gives different
  densities for different shrinking band families (:mod:`condlab.sphere`);
* two algebraically identical likelihood formulations agree to the bit
  (:mod:`condlab.inversion`);
* reparameterizing the data space reshapes likelihoods, posteriors, and
  evidences through inverse-Jacobian factors (:mod:`condlab.transforms`,
  :mod:`condlab.estimators`);
* empirical-Bayes hyperparameters inherit information from the data and the
  forward physics (:mod:`condlab.hierarchy`).
"""

from ._version import __version__
from .errors import (
    CondlabError,
    ConfigError,
    DomainError,
    EmptyBandError,
    TargetUnreachableError,
    UndefinedBayesFactorError,
    ZeroEvidenceError,
)
from .grids import GriddedDensity, histogram_density, integrate_midpoint, uniform_density
from .sphere import (
    BandGeometry,
    CircleDomain,
    GreatCircleBand,
    SphericalPoint,
    SphereSample,
    analytic_band_conditional,
    band_limit_study,
    empirical_band_conditional,
    limit_conditional,
    sample_uniform_sphere,
)
from .inversion import (
    BoxNoise,
    InverseProblem,
    LinearForward,
    ShiftedDataPrior,
    SupportRegion,
    forward_apply,
    likelihood_form1,
    likelihood_form2,
    posterior_on_grid,
)
from .transforms import (
    DataTransform,
    TransformedForward,
    identity_transform,
    jacobian_fd_check,
    make_transform,
    power_d1_transform,
    pushforward_density,
    tan_d1_transform,
    transformed_likelihood,
)
from .estimators import (
    MapEstimate,
    ParameterTransform,
    PosteriorSummary,
    affine_param_transform,
    base_evidence,
    bayes_factor,
    beta_shaped_density,
    cube_param_transform,
    evidence,
    evidence_targeting_transform,
    identity_param_transform,
    map_estimate,
    map_noninvariance_demo,
    pushforward_density_1d,
    transformed_evidence,
)
from .hierarchy import (
    AcausalityRow,
    HierarchicalModel,
    HyperparameterFit,
    acausality_report,
    empirical_bayes_fit,
    marginal_loglik,
)
from .config import ExperimentConfig, load_config, parse_config
from .experiments import Check, RunResult, report, run

__all__ = [name for name in dir() if not name.startswith("_")]
