"""A small probabilistic programming runtime built on composable effect handlers."""
from .bijectors import Affine, Chain, Exp, Invert, Sigmoid, constraining_transform
from .distributions import Beta, Binomial, HalfCauchy, Normal, Transformed
from .effects import Context, Forwarder, Handler, SampleSite, SiteResult, handlers, perform, with_handler
from .handlers import (
    Condition,
    LogJoint,
    MeanFieldGuide,
    NonCenter,
    Substitute,
    Trace,
    TraceHandler,
    Unconstrain,
    log_joint,
    make_condition,
    make_log_joint,
    make_mean_field_guide,
    make_noncenter,
    make_substitute,
    make_trace,
    make_unconstrain,
    trace_model,
)
from .inference import ADVIConfig, MHConfig, PosteriorSamples, advi_fit, elbo_estimate, mh_run
from .models import beta_binomial, normal_normal, registry_lookup

__version__ = "0.1.0"
