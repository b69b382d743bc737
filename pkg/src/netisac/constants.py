"""Physical constants and unit conversions used across the package."""

SPEED_OF_LIGHT = 299_792_458.0  # m/s

# Channels for more antennas than this are never generated; the per-link
# fading draws are fixed-length so that smaller arrays are prefixes of
# larger ones (needed for zero-pad warm starts across antenna sweeps).
MAX_ANTENNAS = 64


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    import math

    if x <= 0.0:
        raise ValueError("cannot convert non-positive value to dB")
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(w: float) -> float:
    import math

    if w <= 0.0:
        raise ValueError("cannot convert non-positive power to dBm")
    return 10.0 * math.log10(w) + 30.0
