"""scikit-learn style front end.

Both estimators are model based: ``fit`` builds the per-element test
matrices from the mesh, partition and prior bounds and ignores ``X``.
Measurement data enters through ``predict`` / ``decision_function`` as an
array of ``n_samples`` measurement matrices, either flattened row-major to
shape ``(n_samples, (L-1)**2)`` or stacked as ``(n_samples, L-1, L-1)``.

>>> det = MonotonicityDetector(mesh=mesh, partition=part, sigma0=1.0,
...                            contrast=10.0, z0=1.0, noise=0.05).fit()
>>> det.predict(R_batch)            # (n_samples, n_elements) booleans
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .detection import DetectionResult, build_test_bank, run_tests
from .guarantees import GuaranteeReport, verify
from .setting import SettingAssumptions, check_mode


class _MonotonicityBase(BaseEstimator):
    def __init__(
        self,
        mesh=None,
        partition=None,
        sigma0=1.0,
        contrast=1.0,
        z0=1.0,
        background_error=0.0,
        impedance_error=0.0,
        noise=0.0,
        polarity="conductive",
        mode="nonlinearized",
        sigma_max=None,
        roi=None,
    ):
        self.mesh = mesh
        self.partition = partition
        self.sigma0 = sigma0
        self.contrast = contrast
        self.z0 = z0
        self.background_error = background_error
        self.impedance_error = impedance_error
        self.noise = noise
        self.polarity = polarity
        self.mode = mode
        self.sigma_max = sigma_max
        self.roi = roi

    def setting(self) -> SettingAssumptions:
        if self.mesh is None or self.partition is None:
            raise ValueError("mesh and partition must be set before fitting")
        z0 = np.asarray(self.z0, dtype=float)
        if z0.ndim == 0:
            z0 = np.full(self.mesh.n_electrodes, float(z0))
        return SettingAssumptions(
            sigma0=self.sigma0,
            contrast=self.contrast,
            z0=z0,
            background_error=self.background_error,
            impedance_error=self.impedance_error,
            noise=self.noise,
            polarity=self.polarity,
            sigma_max=self.sigma_max,
            roi=self.roi,
        )

    def _fit_bank(self):
        check_mode(self.mode)
        self.setting_ = self.setting()
        self.bank_ = build_test_bank(self.setting_, self.partition, self.mesh, self.mode)
        self.n_elements_ = len(self.bank_)
        self.n_measurements_ = self.mesh.n_electrodes - 1
        return self


class MonotonicityDetector(_MonotonicityBase):
    """Marks partition elements whose monotonicity test passes."""

    def fit(self, X=None, y=None):
        return self._fit_bank()

    def _measurements(self, X) -> np.ndarray:
        n = self.n_measurements_
        X = np.asarray(X, dtype=float)
        if X.shape == (n, n) and n * n != n:
            X = X[None]
        if X.ndim == 3:
            X = X.reshape(len(X), -1)
        X = check_array(X, dtype=float)
        if X.shape[1] != n * n:
            raise ValueError(f"expected {n * n} features per sample, got {X.shape[1]}")
        return X.reshape(-1, n, n)

    def detect(self, R_delta) -> DetectionResult:
        check_is_fitted(self, "bank_")
        return run_tests(self.bank_, R_delta, self.setting_.noise)

    def decision_function(self, X) -> np.ndarray:
        """Eigenvalue statistic per sample and element, shape (n_samples, n_elements)."""
        check_is_fitted(self, "bank_")
        return np.array([self.detect(R).statistics for R in self._measurements(X)])

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "bank_")
        return np.array([self.detect(R).flags for R in self._measurements(X)])


class ResolutionVerifier(_MonotonicityBase):
    """Checks whether the detector's resolution guarantee holds.

    After ``fit`` the attributes ``margins_``, ``mu_``, ``delta_star_`` and
    ``holds_`` describe the outcome; ``report_`` keeps the full report.
    """

    def fit(self, X=None, y=None):
        self._fit_bank()
        report: GuaranteeReport = verify(
            self.setting_, self.partition, self.mesh, self.mode, bank=self.bank_
        )
        self.report_ = report
        self.margins_ = report.margins
        self.mu_ = report.mu
        self.delta_star_ = report.delta_star
        self.holds_ = report.holds
        return self

    def score(self, X=None, y=None) -> float:
        """Largest tolerable noise level."""
        check_is_fitted(self, "report_")
        return self.delta_star_

    def detector(self) -> MonotonicityDetector:
        """A detector sharing this verifier's parameters and test matrices."""
        check_is_fitted(self, "bank_")
        det = MonotonicityDetector(**self.get_params())
        det.setting_ = self.setting_
        det.bank_ = self.bank_
        det.n_elements_ = self.n_elements_
        det.n_measurements_ = self.n_measurements_
        return det
