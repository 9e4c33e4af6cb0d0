from pydantic import BaseModel, ConfigDict, Field
from enum import Enum
from typing import Any, Dict, List, Optional


class RadiusMethod(str, Enum):
    compression = "compression"
    theta_sup = "theta"
    sampling = "sampling"


class CheckClass(str, Enum):
    equality = "equality"
    inequality = "inequality"


class CheckId(str, Enum):
    NormIdentity = "NormIdentity"
    RadiusEquiv = "RadiusEquiv"
    UnitaryInvariance = "UnitaryInvariance"
    PowerIneq = "PowerIneq"
    Lemma21 = "Lemma21"
    MainOffDiag = "MainOffDiag"
    Remark24Chain = "Remark24Chain"
    SelfBound = "SelfBound"
    NilpotentHalf = "NilpotentHalf"
    RowBound = "RowBound"
    RepeatedRows = "RepeatedRows"
    SharpOffDiag = "SharpOffDiag"
    FullBlock = "FullBlock"
    SumDiffChain = "SumDiffChain"
    # vector-level check, not part of the operator suite
    Buzano = "Buzano"


# -----------------------------------------------------------------------------
# SETTINGS (config.yaml)
# -----------------------------------------------------------------------------
class KernelSettings(BaseModel):
    eps_eig: float = 1e-10
    eps_mp: float = 1e-10
    eps_rank: float = 1e-10
    eps_neg: float = 1e-10
    eps_herm: float = 1e-10
    max_sweeps: int = 64


class ThetaSettings(BaseModel):
    grid_points: int = Field(default=1024, ge=8)
    refine_brackets: int = Field(default=3, ge=1)
    tol_theta: float = Field(default=1e-12, gt=0.0)


class SemiHilbertSettings(BaseModel):
    eps_mem: float = 1e-8
    tol_eq: float = 1e-7
    tol_ineq: float = 1e-8
    method: RadiusMethod = RadiusMethod.compression
    agreement_tol: float = 1e-6
    cross_validate: bool = False
    sampling_count: int = Field(default=100_000, ge=1)
    sampling_polish_steps: int = Field(default=0, ge=0)


class CertifierSettings(BaseModel):
    dims: List[int] = Field(default_factory=lambda: [2, 3])
    trials: int = 20
    seed: int = 0
    workers: int = 1
    progress: bool = True
    probe_restarts: int = Field(default=6, ge=1)
    probe_step: float = 0.1
    probe_min_step: float = 1e-9


class LoggingSettings(BaseModel):
    level: str = "INFO"


class Settings(BaseModel):
    kernel: KernelSettings = Field(default_factory=KernelSettings)
    theta: ThetaSettings = Field(default_factory=ThetaSettings)
    semihilbert: SemiHilbertSettings = Field(default_factory=SemiHilbertSettings)
    certifier: CertifierSettings = Field(default_factory=CertifierSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)


# -----------------------------------------------------------------------------
# REPORTS
# -----------------------------------------------------------------------------
class CheckResult(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    check: CheckId
    seed: int
    dim: int
    rank: int
    lhs: float
    rhs: float
    slack: float
    normalized_slack: float
    tolerance: float
    passed: bool = Field(alias="pass")
    note: str = ""


class CheckAggregate(BaseModel):
    check: CheckId
    count: int = 0
    failures: int = 0
    min_slack: Optional[float] = None
    min_normalized_slack: Optional[float] = None
    argmin_seed: Optional[int] = None
    argmin_dim: Optional[int] = None
    argmin_rank: Optional[int] = None


class ReportMeta(BaseModel):
    seed: int
    dims: List[int]
    ranks: Dict[str, List[int]]
    trials: int
    tolerances: Dict[str, float]
    version: str


class SuiteReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    meta: ReportMeta
    results: List[CheckResult] = Field(default_factory=list)
    summary: Dict[str, CheckAggregate] = Field(default_factory=dict)
    passed: bool = Field(default=True, alias="pass")

    def to_json(self):
        return self.model_dump_json(by_alias=True, indent=2)

    @classmethod
    def from_json(cls, text):
        return cls.model_validate_json(text)


class ProbeStep(BaseModel):
    restart: int
    iteration: int
    operator: str
    row: int
    col: int
    part: str
    delta: float
    normalized_slack: float


class ProbeResult(BaseModel):
    check: CheckId
    dim: int
    rank: int
    seed: int
    mode: str
    iterations: int
    min_slack: float
    min_normalized_slack: float
    falsification: bool = False
    trace: List[ProbeStep] = Field(default_factory=list)
    operators: Dict[str, Any] = Field(default_factory=dict)


class MatrixFile(BaseModel):
    """{"n": 2, "A": [[[re, im], ...], ...], "T": ...}; every named matrix is n x n."""
    model_config = ConfigDict(extra="allow")

    n: int = Field(ge=1)

    def names(self):
        return sorted((self.model_extra or {}).keys())
