"""scikit-learn shaped wrapper around a spectral datum.

``fit`` builds (and validates) the datum from hyperparameters; ``transform``
maps plane points of shape (N, 2) to sphere points of shape (N, n+1).
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import DomainError
from .evaluator import evaluate
from .moduli import rect_data, s5_exact_data, square_data
from .spectral import ImmersionData, s5_family, validate


class TorusImmersion(TransformerMixin, BaseEstimator):
    """Immersion of the plane in S^n for one of the three families.

    family="s5" uses ``h``/``rho`` or ``a``/``b``; "rect" uses ``q1``, ``q2``,
    ``n`` and ``omega``; "square" uses ``S`` and ``n``.  ``data`` bypasses the
    constructors entirely.
    """

    def __init__(self, family="square", *, h=None, rho=0.0, a=None, b=None, q1=None, q2=None, S=None, n=None, omega=None, data=None):
        self.family = family
        self.h = h
        self.rho = rho
        self.a = a
        self.b = b
        self.q1 = q1
        self.q2 = q2
        self.S = S
        self.n = n
        self.omega = omega
        self.data = data

    def _build(self) -> ImmersionData:
        if self.data is not None:
            if not isinstance(self.data, ImmersionData):
                raise DomainError("data must be an ImmersionData")
            return self.data
        if self.family == "s5":
            if self.a is not None:
                return s5_exact_data(self.a, self.b)
            return s5_family(self.h, self.rho)
        if self.family == "rect":
            return rect_data(self.q1, self.q2, self.n, self.omega)
        if self.family == "square":
            return square_data(self.S, self.n)
        raise DomainError(f"unknown family {self.family!r}")

    def fit(self, X=None, y=None):
        if X is not None:
            check_array(X, ensure_min_features=2)
        data = self._build()
        report = validate(data)
        if not report.passed:
            raise DomainError(f"datum fails conditions {report.failed()}")
        self.data_ = data
        self.n_features_in_ = 2
        self.n_components_ = data.n + 1
        return self

    def transform(self, X):
        check_is_fitted(self, "data_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected points of shape (N, 2), got {X.shape}")
        return evaluate(self.data_, X[:, 0], X[:, 1])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "data_")
        return np.array([f"c{i}" for i in range(self.n_components_)], dtype=object)
