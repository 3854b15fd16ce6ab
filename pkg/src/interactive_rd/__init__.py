"""One- and two-message sum-rate-distortion computations for two-terminal
lossy source coding over finite alphabets."""
from .binary_erasure import (
    BinaryJoint,
    DsbsParams,
    ErasureAlphaPair,
    c_functional,
    eta_functional,
    phi,
    psi,
    rho1_exact,
    rsum1_dsbs,
)
from .errors import DomainError, FileFormatError, InfeasibleDistortionError, SearchExhaustedError
from .info_core import (
    Channel,
    DistortionMatrix,
    FinitePmf,
    JointPmf,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_information,
    entropy_of_ratio,
    expected_distortion,
)
from .interaction_gain import GainCertificate, find_gain_witness, limit_gap, midpoint_violation
from .two_message import (
    Table1Params,
    TwoMessagePoint,
    TwoMessageScheme,
    entropy_ratio_check,
    evaluate_scheme,
    find_ratio_witness,
    table1_point,
    table1_scheme,
)
from .wyner_ziv import GridSpec, WzSolution, optimal_decoder, rho1_oracle, wz_rate_oracle

__version__ = "0.1.0"
