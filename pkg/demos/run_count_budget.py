"""How many circuit runs the scheme costs, and what the hardening options add.

Compares per-sample execution with the basis/superposition schedule, shows
the worst case on a permutation circuit, and runs the padded and decoy
variants that hide the data dimension and the real parameters.
"""

from vqcloud import AnsatzSpec, CloudCore, extract_b
from vqcloud.cli import bench_rows
from vqcloud.protocol import extract_padded, extract_with_decoys, pad_dimension

# %% per-sample execution vs one extraction (best and worst case)
print("d      samples  per-sample  best   worst")
for d, s, conventional, best, worst in bench_rows([16, 784, 1024], [1000, 50000]):
    print(f"{d:<6} {s:<8} {conventional:<11} {best:<6} {worst}")

# %% a permutation circuit leaves most rows empty under the first reference
core = CloudCore()
_, report = extract_b(core, AnsatzSpec.zeros(3, 1))
print("\npermutation circuit, d=8:", report.runs_issued, "runs, references", report.references_used)

# %% padding: 5 real features, but the cloud sees a full 3-qubit extraction
core = CloudCore()
b, report = extract_padded(core, AnsatzSpec.random(3, 1, seed=3), pad_dimension(5, 3))
print("padded extraction:", report.runs_issued, "runs; columns kept:", b.d)

# %% decoys: the real angles hide among three random sets
core = CloudCore()
result = extract_with_decoys(core, AnsatzSpec.random(2, 1, seed=3), k=3, seed=11)
sets = {tuple(e.thetas) for e in core.audit_log()}
print("parameter sets seen by the cloud:", len(sets), "real one at index", result.schedule.real_index)
