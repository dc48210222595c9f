"""Reference outcome tables for the three protocols.

Labels use the ASCII forms accepted on the command line: ``phi1+_phi2-`` is
the polarization Bell state Phi1+ times the spatial Bell state Phi2-, and NV
outcomes are ``phi+`` / ``phi-``.

Two listed entries cannot come from any unitary evolution and are kept
verbatim next to their corrected values (``*_AS_LISTED`` vs the plain tables).
"""

from __future__ import annotations

P, M = "phi+", "phi-"

# two-photon generation: (NV1, NV2) -> photon state
TABLE1 = {
    (P, M): "phi1-_phi1-",
    (P, P): "phi1-_phi2-",
    (M, M): "phi2-_phi1-",
    (M, P): "phi2-_phi2-",
}

# three-photon generation: (NV1, NV2, NV3) -> photon state
TABLE2_AS_LISTED = {
    (P, M, M): "psi1+_psi2+",
    (P, M, P): "psi1+_psi2-",
    (P, P, M): "psi4+_psi2+",
    (P, P, P): "psi4+_psi2-",
    (M, P, M): "psi3+_psi2+",
    (M, P, P): "psi3+_psi2-",
    (M, M, M): "psi2+_psi1+",
    (M, M, P): "psi2+_psi2-",
}
# every other row pairs NV3 = phi- with spatial psi2+; the odd one out is corrected
TABLE2 = dict(TABLE2_AS_LISTED)
TABLE2[(M, M, M)] = "psi2+_psi2+"
TABLE2_CORRECTIONS = {(M, M, M): ("psi2+_psi1+", "psi2+_psi2+")}

# analyzer stage 1: input -> (photon state, NV1, NV2); the listed table
# groups inputs with a +/- shorthand, expanded here row by row
TABLE3 = {
    "phi1+_phi1+": ("phi1+_phi1+", M, M),
    "phi1-_phi1+": ("phi1-_phi1+", M, M),
    "phi2+_phi1+": ("phi2-_phi2-", M, P),
    "phi2-_phi1+": ("phi2+_phi2-", M, P),
    "phi1+_phi1-": ("phi1-_phi2+", M, P),
    "phi1-_phi1-": ("phi1+_phi2+", M, P),
    "phi2+_phi1-": ("phi2+_phi1-", M, M),
    "phi2-_phi1-": ("phi2-_phi1-", M, M),
    "phi1+_phi2+": ("phi1-_phi1-", P, M),
    "phi1-_phi2+": ("phi1+_phi1-", P, M),
    "phi2+_phi2+": ("phi2+_phi2+", P, P),
    "phi2-_phi2+": ("phi2-_phi2+", P, P),
    "phi1+_phi2-": ("phi1+_phi2-", P, P),
    "phi1-_phi2-": ("phi1-_phi2-", P, P),
    "phi2+_phi2-": ("phi2-_phi1+", P, M),
    "phi2-_phi2-": ("phi2+_phi1+", P, M),
}

# after stage 1 followed by the BS and QWP on both photons
STAGE2_CHECKS = {
    "phi1+_phi1+": "phi1+_phi1+",
    "phi1-_phi1+": "phi2+_phi1+",
    "phi2+_phi1-": "phi1-_phi2+",
    "phi2-_phi1-": "phi2-_phi2+",
}

# analyzer photon states after all NV stages, before restoration
TABLE4_AS_LISTED = {
    "phi1+_phi1+": "phi1+_phi1+",
    "phi1-_phi1+": "phi2-_phi2-",
    "phi2+_phi1+": "phi2-_phi1+",
    "phi2-_phi1+": "phi1-_phi2-",
    "phi1+_phi1-": "phi2+_phi1-",
    "phi1-_phi1-": "phi1-_phi2+",
    "phi2+_phi1-": "phi1+_phi1-",
    "phi2-_phi1-": "phi2-_phi2+",
    "phi1+_phi2+": "phi2+_phi2+",
    "phi1-_phi2+": "phi1-_phi1-",
    "phi2+_phi2+": "phi1+_phi2+",
    "phi2-_phi2+": "phi2-_phi1-",
    "phi1+_phi2-": "phi1+_phi2-",
    "phi1-_phi2-": "phi2-_phi1+",
    "phi2+_phi2-": "phi2+_phi2-",
    "phi2-_phi2-": "phi1-_phi1+",
}
# the listed map sends two inputs to phi2-_phi1+, which no unitary can do;
# the phi2+_phi1+ input is in fact left unchanged
TABLE4 = dict(TABLE4_AS_LISTED)
TABLE4["phi2+_phi1+"] = "phi2+_phi1+"
TABLE4_CORRECTIONS = {"phi2+_phi1+": ("phi2-_phi1+", "phi2+_phi1+")}

# analyzer NV signature (NV1, NV2, NV3, NV4) per input
TABLE5 = {
    "phi1+_phi1+": (M, M, M, M),
    "phi1-_phi1+": (M, M, M, P),
    "phi2+_phi1+": (M, P, P, M),
    "phi2-_phi1+": (M, P, P, P),
    "phi1+_phi1-": (M, P, M, M),
    "phi1-_phi1-": (M, P, M, P),
    "phi2+_phi1-": (M, M, P, M),
    "phi2-_phi1-": (M, M, P, P),
    "phi1+_phi2+": (P, M, P, P),
    "phi1-_phi2+": (P, M, P, M),
    "phi2+_phi2+": (P, P, M, P),
    "phi2-_phi2+": (P, P, M, M),
    "phi1+_phi2-": (P, P, P, P),
    "phi1-_phi2-": (P, P, P, M),
    "phi2+_phi2-": (P, M, M, P),
    "phi2-_phi2-": (P, M, M, M),
}
