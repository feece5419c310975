"""Where the dispersion notch sits and what it does to bit loading.

First the closed-form picture: the small-signal intensity response of
a chirped source through dispersive fiber, its first null as a
function of distance, and how the chirp sign shifts that null per
band. Then a full 2.2 km link run at 100G in the 1565 nm band dumps
the measured SNR profile and the bits the water-filler actually
assigned around the dip.

Run:  python3 demos/notch_anatomy.py
"""

from pathlib import Path

import numpy as np

from dmtlink.channel import EmlParams, FiberParams, notch_frequencies
from dmtlink.link import ScenarioConfig, run_point
from dmtlink.loading import write_loading_csv

OUT = Path(__file__).parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    alpha = EmlParams().chirp_alpha
    print(f"First intensity null vs distance (1565.4 nm, chirp {alpha:g}):")
    for km in (1.0, 2.2, 5.0, 10.0, 20.0):
        fiber = FiberParams(length_km=km, wavelength_nm=1565.4,
                            loss_db_per_km=0.2)
        notches = notch_frequencies(fiber, alpha, 64e9)
        chirp_free = notch_frequencies(fiber, 0.0, 64e9)
        f1 = notches[0] / 1e9 if notches.size else float("inf")
        f0 = chirp_free[0] / 1e9 if chirp_free.size else float("inf")
        print(f"  {km:5.1f} km   {f1:6.2f} GHz   (chirp-free {f0:6.2f})")
    print("Positive chirp on anomalous dispersion pulls the null down in "
          "frequency,\nso the usable band shrinks faster than the "
          "chirp-free law suggests.\n")

    fiber_o = FiberParams(length_km=32.6, wavelength_nm=1309.0,
                          loss_db_per_km=0.33)
    n_o = notch_frequencies(fiber_o, alpha, 64e9)
    shown = f"{n_o[0] / 1e9:.1f} GHz" if n_o.size else "none below 64 GHz"
    print(f"Same law at 1309 nm, 32.6 km: first null {shown} -- "
          "the band is effectively flat there.\n")

    print("Full 100G link at 1565.4 nm, 2.2 km (water-filled loading):")
    result = run_point(ScenarioConfig(band="C", data_rate="100G",
                                      length_km=2.2,
                                      min_payload_bits=400_000))
    prof, plan = result.profile, result.plan
    csv = OUT / "loading_C_100G_2p2km.csv"
    write_loading_csv(csv, prof, plan)
    print(f"  status={result.status} ber={result.pre_fec_ber:.3e} "
          f"fec_pass={int(result.fec_pass)}")

    freqs = np.arange(1, 256) * 64e9 / 512 / 1e9
    snr = prof.snr_db
    dip = int(np.argmin(snr))
    print(f"  SNR median {np.median(snr):.1f} dB, minimum {snr[dip]:.1f} dB "
          f"at {freqs[dip]:.1f} GHz")
    lo, hi = max(0, dip - 6), min(255, dip + 7)
    print("  tones around the dip (index: snr_db -> bits):")
    for j in range(lo, hi, 2):
        print(f"    {j + 1:3d}: {snr[j]:6.1f} dB -> {plan.bits[j]} bits")
    carried = int(plan.bits.sum())
    print(f"  {carried} bits/frame total; the dip tones carry little or "
          "nothing and the\n  allocator piles bits onto the clean low "
          "tones instead.")
    print(f"  loading CSV: {csv}")


if __name__ == "__main__":
    main()
