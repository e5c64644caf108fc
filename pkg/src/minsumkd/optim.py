"""Update rules for the offsets. Both return a new array and leave the input untouched."""
import numpy as np

from minsumkd.enums import OptimizerKind
from minsumkd.exceptions import ConfigError


class SGD:
    kind = OptimizerKind.SGD

    def __init__(self, learning_rate):
        self.learning_rate = float(learning_rate)
        self.steps = 0

    def step(self, params, grad):
        self.steps += 1
        return params - self.learning_rate * grad

    def state(self):
        return {"kind": self.kind, "learning_rate": self.learning_rate, "steps": self.steps}

    @classmethod
    def from_state(cls, state):
        optimizer = cls(state["learning_rate"])
        optimizer.steps = int(state["steps"])
        return optimizer


class Adam:
    kind = OptimizerKind.ADAM

    def __init__(self, learning_rate, betas=(0.9, 0.999), eps=1e-8):
        self.learning_rate = float(learning_rate)
        self.betas = tuple(float(b) for b in betas)
        self.eps = float(eps)
        self.steps = 0
        self._m = None
        self._v = None

    def step(self, params, grad):
        if self._m is None:
            self._m = np.zeros_like(params)
            self._v = np.zeros_like(params)
        beta1, beta2 = self.betas
        self.steps += 1
        self._m = beta1 * self._m + (1.0 - beta1) * grad
        self._v = beta2 * self._v + (1.0 - beta2) * grad * grad
        m_hat = self._m / (1.0 - beta1 ** self.steps)
        v_hat = self._v / (1.0 - beta2 ** self.steps)
        return params - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)

    def state(self):
        return {
            "kind": self.kind,
            "learning_rate": self.learning_rate,
            "betas": list(self.betas),
            "eps": self.eps,
            "steps": self.steps,
            "m": None if self._m is None else self._m.tolist(),
            "v": None if self._v is None else self._v.tolist(),
        }

    @classmethod
    def from_state(cls, state):
        optimizer = cls(state["learning_rate"], betas=state["betas"], eps=state["eps"])
        optimizer.steps = int(state["steps"])
        if state.get("m") is not None:
            optimizer._m = np.array(state["m"], dtype=np.float64)
            optimizer._v = np.array(state["v"], dtype=np.float64)
        return optimizer


def restore_optimizer(state):
    """Rebuilds an optimizer from the `state()` stored in a checkpoint."""
    kinds = {SGD.kind: SGD, Adam.kind: Adam}
    kind = state.get("kind")
    if kind not in kinds:
        raise ConfigError(f"Unknown optimizer '{kind}'.")
    return kinds[kind].from_state(state)


def create_optimizer(kind, learning_rate):
    if kind == OptimizerKind.SGD:
        return SGD(learning_rate)
    if kind == OptimizerKind.ADAM:
        return Adam(learning_rate)
    raise ConfigError(f"Unknown optimizer '{kind}'.")
