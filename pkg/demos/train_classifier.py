"""Train a two-class classifier without sending any feature value to the cloud.

Every epoch extracts B at the current angles over HTTP, evaluates the cost
and the gradient classically, and steps the angles. The final B is the
model: inference needs no further quantum access.
"""

import numpy as np

from vqcloud import AmplitudeEncoder, AnsatzSpec, TrainConfig, infer, make_blobs, serve, train
from vqcloud.trainer import accuracy, simulate_marginals

# %% two Gaussian blobs, one class per blob
data = make_blobs(20, seed=7)
print("samples:", len(data), "features:", data.dimension)

# %% 30 epochs of plain gradient descent on the mean squared error
with serve() as server:
    model = train(data, AmplitudeEncoder(), AnsatzSpec.zeros(2, 2), TrainConfig(epochs=30, learning_rate=0.5), server)
    requests = len(server.audit_log())

for epoch in (0, 10, 20, 29):
    print(f"epoch {epoch:2d} cost {model.history[epoch]:.4f}")
print("final cost:", round(model.final_cost, 4), "training accuracy:", accuracy(model, data))
print("cloud runs over the whole training:", requests)

# %% classical inference through B agrees with simulating the trained circuit
for x in ([2.0, 0.3], [0.5, 1.9], [1.0, 1.0]):
    cls, g = infer(model, np.array(x))
    sim = simulate_marginals(model.ansatz, model.encoder, np.array(x))
    print(f"x={x} -> class {cls}, marginals {np.round(g, 4)}, |diff| {np.abs(g - sim).max():.1e}")
