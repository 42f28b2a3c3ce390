"""Clustered mmWave channel generation for uniform square planar arrays.

The channel is a sum over scattering clusters of per-ray outer products of
receive and transmit steering vectors, scaled so the expected squared
Frobenius norm equals ``n_tx * n_rx`` per subcarrier.  The wideband variant
shares one set of gains and angles across subcarriers and applies a per-
cluster delay phase ``exp(-2j*pi*(i-1)*k/K)`` for cluster i at subcarrier k.

Reproducibility: every generator draws from ``numpy.random.default_rng(seed)``
(PCG64) in a fixed, documented order:

1. ``standard_normal((n_clusters, n_rays))`` -- real parts of the ray gains;
2. ``standard_normal((n_clusters, n_rays))`` -- imaginary parts; the gain is
   ``(re + 1j*im) / sqrt(2)`` so each gain is complex standard Gaussian;
3. ``uniform(0, 2*pi, (n_clusters, 4))`` -- cluster mean angles, columns in
   the order (tx azimuth, tx elevation, rx azimuth, rx elevation);
4. ``standard_normal((n_clusters, n_rays, 4)) * angular_spread_rad`` -- ray
   offsets about the cluster means, same component order, cluster by cluster.

The planar-array element for antenna indices (p, q) is enumerated p-major:
linear index = p * side + q.
"""

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArrayGeometry",
    "ClusterParams",
    "ClusterAngles",
    "ChannelRealization",
    "array_response",
    "sample_cluster_angles",
    "gen_narrowband",
    "gen_wideband",
    "save_channel",
    "load_channel",
]

_DUMP_FORMAT = "hybridsim-channel-v1"


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform square planar array: ``side`` x ``side`` elements."""

    side: int
    spacing_over_lambda: float = 0.5

    def __post_init__(self):
        if self.side < 1:
            raise ValueError("side must be >= 1")
        if self.spacing_over_lambda <= 0:
            raise ValueError("spacing_over_lambda must be positive")

    @property
    def n_elements(self):
        return self.side * self.side


@dataclass(frozen=True)
class ClusterParams:
    """Cluster/ray counts and the common angular spread (radians)."""

    n_clusters: int = 8
    n_rays: int = 10
    angular_spread_rad: float = np.radians(10.0)

    def __post_init__(self):
        if self.n_clusters < 1 or self.n_rays < 1:
            raise ValueError("n_clusters and n_rays must be positive")
        if self.angular_spread_rad < 0:
            raise ValueError("angular_spread_rad must be nonnegative")


@dataclass(frozen=True)
class ClusterAngles:
    """Cluster mean angles, shape (n_clusters,), and per-ray Gaussian offsets,
    shape (n_clusters, n_rays).  Absolute ray angles = mean + offset."""

    tx_az_mean: np.ndarray
    tx_el_mean: np.ndarray
    rx_az_mean: np.ndarray
    rx_el_mean: np.ndarray
    tx_az_offset: np.ndarray
    tx_el_offset: np.ndarray
    rx_az_offset: np.ndarray
    rx_el_offset: np.ndarray

    @property
    def tx_azimuth(self):
        return self.tx_az_mean[:, None] + self.tx_az_offset

    @property
    def tx_elevation(self):
        return self.tx_el_mean[:, None] + self.tx_el_offset

    @property
    def rx_azimuth(self):
        return self.rx_az_mean[:, None] + self.rx_az_offset

    @property
    def rx_elevation(self):
        return self.rx_el_mean[:, None] + self.rx_el_offset


@dataclass
class ChannelRealization:
    """One channel draw: ``matrices[k]`` is the n_rx x n_tx matrix at
    subcarrier k (a single-element list when narrowband)."""

    matrices: list = field(repr=False)
    seed: int = 0
    tx_geometry: ArrayGeometry = ArrayGeometry(1)
    rx_geometry: ArrayGeometry = ArrayGeometry(1)
    params: ClusterParams = ClusterParams()
    n_subcarriers: int = 1

    @property
    def matrix(self):
        """The narrowband matrix (subcarrier 0)."""
        return self.matrices[0]


def array_response(geom, azimuth, elevation):
    """Steering vector of a square planar array toward (azimuth, elevation).

    Element (p, q), with p, q in 0..side-1 and linear index p*side + q, is
    ``(1/side) * exp(2j*pi*(d/lambda)*(p*sin(az)*sin(el) + q*cos(el)))``.
    The vector has unit Euclidean norm.

    Parameters
    ----------
    geom : ArrayGeometry
    azimuth, elevation : float
        Angles in radians.

    Returns
    -------
    ndarray, shape (side**2,), complex
    """
    a = _response_matrix(geom, np.asarray([azimuth]), np.asarray([elevation]))
    return a[:, 0]


def _response_matrix(geom, azimuth, elevation):
    """Steering vectors for arrays of angles, stacked as columns.

    Same element convention as ``array_response``; one column per angle pair.
    """
    azimuth = np.asarray(azimuth, dtype=float).ravel()
    elevation = np.asarray(elevation, dtype=float).ravel()
    idx = np.arange(geom.side)
    # phase factor per angle: p-term uses sin(az)*sin(el), q-term cos(el)
    k = 2.0 * np.pi * geom.spacing_over_lambda
    p_phase = np.exp(1j * k * np.outer(idx, np.sin(azimuth) * np.sin(elevation)))
    q_phase = np.exp(1j * k * np.outer(idx, np.cos(elevation)))
    # (p, q, angle) -> row-major flatten over (p, q) gives index p*side + q
    a = p_phase[:, None, :] * q_phase[None, :, :]
    return a.reshape(geom.side * geom.side, azimuth.size) / geom.side


def sample_cluster_angles(rng, params):
    """Draw cluster mean angles and per-ray offsets.

    Cluster means are uniform on [0, 2*pi], independently for transmit and
    receive azimuth and elevation; ray offsets are zero-mean Gaussian with
    standard deviation ``params.angular_spread_rad``.  Follows steps 3-4 of
    the module-level stream order.
    """
    two_pi = 2.0 * np.pi
    means = rng.uniform(0.0, two_pi, size=(params.n_clusters, 4))
    offsets = params.angular_spread_rad * rng.standard_normal(
        size=(params.n_clusters, params.n_rays, 4)
    )
    return ClusterAngles(
        tx_az_mean=means[:, 0],
        tx_el_mean=means[:, 1],
        rx_az_mean=means[:, 2],
        rx_el_mean=means[:, 3],
        tx_az_offset=offsets[:, :, 0],
        tx_el_offset=offsets[:, :, 1],
        rx_az_offset=offsets[:, :, 2],
        rx_el_offset=offsets[:, :, 3],
    )


def gen_wideband(seed, tx_geom, rx_geom, params, n_subcarriers):
    """Generate a frequency-selective channel over ``n_subcarriers`` bins.

    One set of gains and angles is shared by all subcarriers; cluster i
    contributes with delay phase ``exp(-2j*pi*(i-1)*k/K)`` at subcarrier k.
    With ``n_subcarriers=1`` the output matches ``gen_narrowband`` exactly
    for the same seed.

    Parameters
    ----------
    seed : int
        Seed for the generator; recorded in the returned realization.
    tx_geom, rx_geom : ArrayGeometry
    params : ClusterParams
    n_subcarriers : int

    Returns
    -------
    ChannelRealization
    """
    if n_subcarriers < 1:
        raise ValueError("n_subcarriers must be >= 1")
    rng = np.random.default_rng(seed)
    re = rng.standard_normal((params.n_clusters, params.n_rays))
    im = rng.standard_normal((params.n_clusters, params.n_rays))
    gains = (re + 1j * im) / np.sqrt(2.0)
    angles = sample_cluster_angles(rng, params)

    a_tx = _response_matrix(
        tx_geom, angles.tx_azimuth.ravel(), angles.tx_elevation.ravel()
    )
    a_rx = _response_matrix(
        rx_geom, angles.rx_azimuth.ravel(), angles.rx_elevation.ravel()
    )
    n_tx = tx_geom.n_elements
    n_rx = rx_geom.n_elements
    gamma = np.sqrt(n_tx * n_rx / (params.n_clusters * params.n_rays))

    cluster_idx = np.repeat(np.arange(params.n_clusters), params.n_rays)
    a_tx_h = a_tx.conj().T
    matrices = []
    for k in range(n_subcarriers):
        delay = np.exp(-2j * np.pi * cluster_idx * k / n_subcarriers)
        weights = gains.ravel() * delay
        matrices.append(gamma * ((a_rx * weights) @ a_tx_h))
    return ChannelRealization(
        matrices=matrices,
        seed=int(seed),
        tx_geometry=tx_geom,
        rx_geometry=rx_geom,
        params=params,
        n_subcarriers=n_subcarriers,
    )


def gen_narrowband(seed, tx_geom, rx_geom, params):
    """Generate a single-carrier channel draw (see ``gen_wideband``)."""
    return gen_wideband(seed, tx_geom, rx_geom, params, n_subcarriers=1)


def save_channel(realization, path):
    """Write a ChannelRealization as structured text (JSON).

    Entries are stored per subcarrier as a flat row-major list of
    interleaved real/imag parts, so the dump replays exactly across
    implementations.
    """
    entries = []
    for h in realization.matrices:
        flat = np.ravel(h)
        inter = np.empty(2 * flat.size)
        inter[0::2] = flat.real
        inter[1::2] = flat.imag
        entries.append(inter.tolist())
    doc = {
        "format": _DUMP_FORMAT,
        "n_rx": realization.rx_geometry.n_elements,
        "n_tx": realization.tx_geometry.n_elements,
        "n_subcarriers": realization.n_subcarriers,
        "seed": realization.seed,
        "tx_geometry": {
            "side": realization.tx_geometry.side,
            "spacing_over_lambda": realization.tx_geometry.spacing_over_lambda,
        },
        "rx_geometry": {
            "side": realization.rx_geometry.side,
            "spacing_over_lambda": realization.rx_geometry.spacing_over_lambda,
        },
        "cluster_params": {
            "n_clusters": realization.params.n_clusters,
            "n_rays": realization.params.n_rays,
            "angular_spread_rad": realization.params.angular_spread_rad,
        },
        "entries": entries,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_channel(path):
    """Read a ChannelRealization written by ``save_channel``."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != _DUMP_FORMAT:
        raise ValueError(f"unrecognized channel dump format: {doc.get('format')!r}")
    n_rx = doc["n_rx"]
    n_tx = doc["n_tx"]
    matrices = []
    for inter in doc["entries"]:
        inter = np.asarray(inter)
        flat = inter[0::2] + 1j * inter[1::2]
        matrices.append(flat.reshape(n_rx, n_tx))
    return ChannelRealization(
        matrices=matrices,
        seed=doc["seed"],
        tx_geometry=ArrayGeometry(**doc["tx_geometry"]),
        rx_geometry=ArrayGeometry(**doc["rx_geometry"]),
        params=ClusterParams(**doc["cluster_params"]),
        n_subcarriers=doc["n_subcarriers"],
    )
