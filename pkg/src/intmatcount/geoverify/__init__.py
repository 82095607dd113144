"""Numerical verification of the volume computations behind C_P."""
from .checks import (VerificationReport, ball_volume_check, jacobian_check, mc_c_eta,
                     minkowski2_quadrature, roundtrip_check, sandwich_check,
                     theta_at_zero, theta_polynomial_check)
from .haar import CATALOGUE, IDENTITIES, haar_identity_check
from .session import (GeometrySession, build_session, delta, delta_tilde, s_ij_det,
                      theta)

__all__ = [
    "VerificationReport", "ball_volume_check", "jacobian_check", "mc_c_eta",
    "minkowski2_quadrature", "roundtrip_check", "sandwich_check", "theta_at_zero",
    "theta_polynomial_check", "CATALOGUE", "IDENTITIES", "haar_identity_check",
    "GeometrySession", "build_session", "delta", "delta_tilde", "s_ij_det", "theta",
]
