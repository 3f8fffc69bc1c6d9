"""Reconstruct the signed amplitude matrix of a circuit from probabilities only.

Starts a local cloud service, runs the basis and superposition schedule
against it, and checks the reconstruction against a direct simulation of
encode-then-run on a few random inputs.
"""

import numpy as np

from vqcloud import AnsatzSpec, ObservableRotation, audit_log, extract_b, serve
from vqcloud.protocol import reconstruct_probabilities
from vqcloud.simulator import run_state

# %% a 3-qubit RealAmplitudes circuit with random angles
ansatz = AnsatzSpec.random(3, reps=2, entanglement="full", seed=42)
print("angles:", np.round(ansatz.thetas, 3))

# %% the cloud only ever sees basis and two-basis superposition inputs
server = serve()
b, report = extract_b(server, ansatz)
print("runs issued:", report.runs_issued, "(2d-1 =", 2 * b.d - 1, ")")
print("references used:", report.references_used)
print("column norms:", np.round(b.column_norms(), 12))

inputs = [(e.input["type"], e.input.get("r"), e.input["i"]) for e in audit_log(server)[:10]]
print("first logged inputs:", inputs)
server.shutdown()

# %% p(x) = (B f)**2 on the client, compared with simulating the encoded state
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(5):
    x = rng.standard_normal(8)
    f = x / np.linalg.norm(x)
    direct = run_state(ansatz, ObservableRotation(), f) ** 2
    worst = max(worst, np.abs(reconstruct_probabilities(b, f) - direct).max())
print(f"max |p_protocol - p_direct| over 5 inputs: {worst:.2e}")

# %% each row is only known up to sign, which the square removes
flipped = b.flip_rows([0, 5])
print("row flip changes p:", not np.allclose(reconstruct_probabilities(flipped, f), reconstruct_probabilities(b, f)))
