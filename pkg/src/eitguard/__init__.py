"""Complete electrode model forward solver, monotonicity-based detection and
verification of resolution guarantees for 2D impedance tomography."""

__version__ = "0.1.0"

from .cem import CemError, CemSystem, measurement_matrix
from .detection import DetectionResult, PartitionMismatch, build_test_bank, detect, run_tests
from .estimators import MonotonicityDetector, ResolutionVerifier
from .guarantees import GuaranteeReport, max_noise, verify, verify_with_roi
from .mesh import (
    DomainSpec,
    Mesh,
    MeshError,
    Partition,
    SectorGrid,
    TriangleList,
    UniformGrid,
    build_mesh,
    build_partition,
    place_electrodes,
)
from .numerics import eigvalsh, solve_spd, spectral_norm, sym_eig
from .scenario import PhantomSpec, Scenario, load_scenario, make_noisy_measurement, make_phantom
from .sensitivity import SensitivityMatrix, sensitivity_matrix
from .setting import RegionOfInterest, SettingAssumptions, SettingError
from .validation import monotonicity_check, sandwich_check
