from typing import TypedDict, List, Optional, Dict, Any


class VerifyRow(TypedDict):
    check: str
    module: str
    passed: bool
    residual: float
    tolerance: float
    expected_failure: bool  # e.g. the s < 2 Schur contrast run
    note: str


class NormSweepRow(TypedDict):
    h: float
    s: float
    C: float
    N: int
    M: int
    R: float
    route: str
    norm: float
    bound: float
    ratio_flag: str  # "ok" or "bound_blowup"
    wall_time: float


class GevreyFitRow(TypedDict):
    symbol: str
    s_nominal: Optional[float]
    rho_fit: float
    C_fit: float
    residual: float
    window: str
    flag: str  # "ok", "narrow_range", "model_mismatch" or "fit_failed"
    beta_fit: float
    rho_other_window: float  # NaN when only one window applies
    window_gap: float
    radius_min: float
    radius_max: float
    h: float
    N: int
    M: int
    R: float
    s: float
    C: float
    wall_time: float


class DecompCheckRow(TypedDict):
    h: float
    N: int
    M: int
    R: float
    s: float
    C: float
    max_rel_diff: float
    route_diffs: Dict[str, float]
    M_h: float
    M_h_over_h_n: float
    coherent_norm_over_sqrt_h: float
    wall_time: float


class ComposeRow(TypedDict):
    x_re: float
    x_im: float
    direct_re: float
    direct_im: float
    fourier_re: float
    fourier_im: float
    rel_diff: float
    h: float
    N: int
    M: int
    R: float
    s: float
    C: float


class SchurRow(TypedDict):
    s: float
    C: float
    K: float
    h: float
    I1: float  # outer region
    I2: float  # inner region
    fourier_side: float


class Provenance(TypedDict):
    experiment: str
    version: str
    config: Dict[str, Any]
    tolerances: Dict[str, float]
    seed: int
    threads: int


class Report(TypedDict):
    provenance: Provenance
    rows: List[Dict[str, Any]]
    warnings: List[str]
    summary: Dict[str, Any]
