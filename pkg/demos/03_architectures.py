"""Fully-connected versus partially-connected analog networks across SNR,
run through the sweep harness (same code path as the CLI)."""

import tempfile
from pathlib import Path

from hybridsim import AdmmConfig, SweepSpec, run_sweep, scale_matched_rho

N_S = 2
N_RF = 2
RUNS = 40
SNRS = [-10.0, 0.0, 10.0]

common = dict(
    n_s=N_S,
    n_rf=N_RF,
    n_tx_side=10,
    n_rx_side=4,
    n_subcarriers=1,
    snr_db_list=SNRS,
    runs=RUNS,
    base_seed=0,
)

out = Path(tempfile.mkdtemp())
full = SweepSpec(
    scenario="narrowband_full",
    admm=AdmmConfig(rho=scale_matched_rho(100, N_RF, N_S), tau=1e-3, seed=0),
    **common,
)
part = SweepSpec(
    scenario="narrowband_partial",
    admm=AdmmConfig(
        rho=scale_matched_rho(100, N_RF, N_S, structure="partially_connected"),
        tau=1e-3,
        seed=0,
    ),
    **common,
)

def means(records, method):
    acc = {}
    for r in records:
        if r.method == method:
            acc.setdefault(r.snr_db, []).append(r.spectral_efficiency)
    return {k: sum(v) / len(v) for k, v in acc.items()}

full_recs = run_sweep(full, out / "full.csv")
part_recs = run_sweep(part, out / "partial.csv")

dig = means(full_recs, "digital_opt")
fc = means(full_recs, "hybrid_full")
pc = means(part_recs, "hybrid_partial")

print(f"100 tx antennas, {N_RF} chains, {RUNS} runs; rates in bits/s/Hz")
print("  SNR     digital    fully-conn   partially-conn")
for snr in SNRS:
    print(f"{snr:+5.0f} dB   {dig[snr]:7.3f}    {fc[snr]:7.3f}      {pc[snr]:7.3f}")
print(f"csv output under {out}")
