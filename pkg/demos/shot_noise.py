"""Extraction from sampled frequencies instead of exact probabilities.

Small probabilities are treated as zero below a shot-dependent cutoff, and
sign decisions inside the noise margin are re-measured once with more shots.
"""

import numpy as np

from vqcloud import AnsatzSpec, CloudCore, ExtractionOptions, ServiceConfig, extract_b
from vqcloud.protocol import reconstruct_probabilities

ansatz = AnsatzSpec.random(3, 2, seed=1)
exact, _ = extract_b(CloudCore(), ansatz)
f = np.ones(8) / np.sqrt(8)

# %% error shrinks roughly like 1/sqrt(shots)
print("shots     runs  retries  sign agreement  max |dp|")
for shots in (10**3, 10**4, 10**5, 10**6):
    b, report = extract_b(CloudCore(ServiceConfig(rng_seed=0)), ansatz, options=ExtractionOptions(shots=shots))
    # rows are defined up to sign, so align each row before comparing; signs
    # are only decided where the probability clears the zero cutoff
    aligned = b.entries * np.where(np.sum(b.entries * exact.entries, axis=1) < 0, -1, 1)[:, None]
    decided = exact.entries**2 > report.eps_zero
    agree = np.mean(np.sign(aligned[decided]) == np.sign(exact.entries[decided]))
    err = np.abs(reconstruct_probabilities(b, f) - reconstruct_probabilities(exact, f)).max()
    print(f"{shots:<9} {report.runs_issued:<5} {report.retries:<8} {agree:<15.3f} {err:.2e}")
