"""Geodesic distance and geohash cell encoding.

Distances use the spherical haversine formula; at campus scale the
error versus an ellipsoid is well below typical GPS accuracy, so the
sphere is good enough for co-location thresholds.
"""

from __future__ import annotations

from math import asin, cos, radians, sin, sqrt

EARTH_RADIUS_M = 6_371_000.0

GEOHASH_BASE32 = "0123456789bcdefghjkmnpqrstuvwxyz"


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters between two lat/lon points (degrees)."""
    phi1, lam1, phi2, lam2 = map(radians, (lat1, lon1, lat2, lon2))
    dphi = phi2 - phi1
    dlam = lam2 - lam1
    a = sin(dphi / 2.0) ** 2 + cos(phi1) * cos(phi2) * sin(dlam / 2.0) ** 2
    # clamp guards roundoff for near-antipodal points
    return 2.0 * EARTH_RADIUS_M * asin(min(1.0, sqrt(a)))


def geohash_encode(lat: float, lon: float, length: int = 8) -> str:
    """Encode a lat/lon point (degrees) to a geohash cell of the given length.

    Interleaved binary bisection, longitude bit first, 5 bits per
    base-32 character.
    """
    if not 1 <= length <= 12:
        raise ValueError(f"geohash length must be in 1..12, got {length}")
    if not -90.0 <= lat <= 90.0:
        raise ValueError(f"latitude out of range: {lat}")
    if not -180.0 <= lon < 180.0:
        raise ValueError(f"longitude out of range: {lon}")

    lat_lo, lat_hi = -90.0, 90.0
    lon_lo, lon_hi = -180.0, 180.0
    chars = []
    bits = 0
    n_bits = 0
    even = True  # longitude bit first
    while len(chars) < length:
        if even:
            mid = (lon_lo + lon_hi) / 2.0
            if lon >= mid:
                bits = (bits << 1) | 1
                lon_lo = mid
            else:
                bits <<= 1
                lon_hi = mid
        else:
            mid = (lat_lo + lat_hi) / 2.0
            if lat >= mid:
                bits = (bits << 1) | 1
                lat_lo = mid
            else:
                bits <<= 1
                lat_hi = mid
        even = not even
        n_bits += 1
        if n_bits == 5:
            chars.append(GEOHASH_BASE32[bits])
            bits = 0
            n_bits = 0
    return "".join(chars)


def geohash_decode_bounds(code: str) -> tuple[float, float, float, float]:
    """Return the (lat_lo, lat_hi, lon_lo, lon_hi) bounding box of a cell."""
    if not code:
        raise ValueError("empty geohash")
    lat_lo, lat_hi = -90.0, 90.0
    lon_lo, lon_hi = -180.0, 180.0
    even = True
    for ch in code:
        try:
            value = GEOHASH_BASE32.index(ch)
        except ValueError:
            raise ValueError(f"invalid geohash character: {ch!r}") from None
        for shift in range(4, -1, -1):
            bit = (value >> shift) & 1
            if even:
                mid = (lon_lo + lon_hi) / 2.0
                if bit:
                    lon_lo = mid
                else:
                    lon_hi = mid
            else:
                mid = (lat_lo + lat_hi) / 2.0
                if bit:
                    lat_lo = mid
                else:
                    lat_hi = mid
            even = not even
    return lat_lo, lat_hi, lon_lo, lon_hi
