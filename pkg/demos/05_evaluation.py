"""Score a whole dataset with the signed-compensation error metric.

Per photo, manually tagged point pairs give the error
sqrt((sum dx)^2 + (sum dy)^2) / (N*q) in degrees, where components are
summed with sign so that scale imperfections averaging out score 0.  A
photo is correct when its error stays under the 4-degree threshold; rates
are broken down by dataset category.
"""

import math
from pathlib import Path
from tempfile import TemporaryDirectory

from peakmatch import (
    RunConfig,
    SynthConfig,
    align_photo,
    alignment_error,
    evaluate_dataset,
    format_summary_table,
    gen_synthetic_case,
    load_case,
    write_case,
)

config = RunConfig()
print(f"threshold: {config.threshold_deg} deg\n")

# a mixed suite: clean cases and noisy recolored ones
cases = []
with TemporaryDirectory() as tmp:
    for seed in range(8):
        noisy = seed >= 4
        synth = gen_synthetic_case(
            SynthConfig(seed=seed, q=2.0, layers=3, photo_fov=60.0,
                        pano_height=120, noise_density=0.4 if noisy else 0.0,
                        recolor=noisy)
        )
        case_dir = write_case(synth, Path(tmp) / f"case_{seed:02d}")
        data = load_case(case_dir)  # same files the CLI's evaluate consumes
        report = align_photo(data.photo, data.panorama,
                             math.radians(data.fov_deg), config)
        err = alignment_error(data.truth, report.alignment, data.q)
        print(f"case {seed}: {'noisy' if noisy else 'clean':<6} "
              f"error {err:7.3f} deg  "
              f"{'ok' if err < config.threshold_deg else 'WRONG'}")
        cases.append((data.truth, report.alignment, data.q))

summary = evaluate_dataset(cases, threshold=config.threshold_deg)
print()
print(format_summary_table(summary))
print(f"\nerror histogram (1-degree bins): {summary.histogram}")
