"""H-selfadjoint random matrices with one eigenvalue of nonpositive type."""

import json

from . import _core
from ._core import (
    AmbiguousClassification,
    NumericalError,
    SearchFailure,
    assemble,
    eig_residual,
    general_eig,
    hermitian_eig,
    is_h_selfadjoint,
    nonpositive_type_eigenvalue,
    real_spectrum,
    run_cli,
    scalar_resolvent,
)

__version__ = _core.__version__


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def stieltjes(measure, z):
    return _core.stieltjes(_text(measure), z)


def q_eval(measure, z, a=0.0, s2=1.0):
    return _core.q_eval(_text(measure), a, s2, z)


def gznt(measure, a=0.0, s2=1.0, method="newton"):
    if method == "newton":
        return _core.gznt_newton(_text(measure), a, s2)
    if method == "discrete":
        return _core.gznt_discrete(_text(measure), a, s2)
    raise ValueError(f"unknown method {method!r}")


def negative_squares(measure, points, a=0.0, s2=1.0, tol=1e-10):
    return _core.negative_squares(_text(measure), a, s2, list(points), tol)


def spectral_measure_of_pair(b, c):
    return json.loads(_core.spectral_measure_of_pair(b, c))


def sample(spec, trial=0):
    return _core.sample(_text(spec), trial)


def run_trials(spec, trials, threads=0):
    return _core.run_trials(_text(spec), trials, threads)


def convergence(spec, sizes, eps, trials, threads=0):
    return json.loads(_core.convergence(_text(spec), list(sizes), eps, trials, threads))


def esd(spec, trial=0):
    return json.loads(_core.esd(_text(spec), trial))


def bq(spec, z, sizes, trials):
    return json.loads(_core.bq(_text(spec), z, list(sizes), trials))


def continuity_probe(measure, a, scale, count=100):
    return json.loads(_core.continuity_probe(_text(measure), a, scale, count))
