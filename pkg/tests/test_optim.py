import json

import numpy as np
import pytest

from minsumkd.exceptions import ConfigError
from minsumkd.optim import Adam
from minsumkd.optim import create_optimizer
from minsumkd.optim import restore_optimizer
from minsumkd.optim import SGD


def test_sgd_steps_against_gradient():
    params = np.array([1.0, 2.0])
    updated = SGD(0.1).step(params, np.array([1.0, -1.0]))
    assert updated.tolist() == pytest.approx([0.9, 2.1])
    assert params.tolist() == [1.0, 2.0]


def test_adam_first_step_moves_by_learning_rate():
    updated = Adam(0.01).step(np.zeros(3), np.array([5.0, -0.2, 1e-3]))
    assert updated == pytest.approx(np.array([-0.01, 0.01, -0.01]), rel=1e-4)


def test_adam_state_counts_steps():
    adam = Adam(0.01)
    params = np.zeros(2)
    for _ in range(3):
        params = adam.step(params, np.ones(2))
    state = adam.state()
    assert state["kind"] == "adam"
    assert state["steps"] == 3


def test_create_optimizer():
    assert isinstance(create_optimizer("sgd", 0.1), SGD)
    assert isinstance(create_optimizer("adam", 0.1), Adam)


def test_create_optimizer_when_unknown_raises():
    with pytest.raises(ConfigError):
        create_optimizer("rmsprop", 0.1)


def test_restored_adam_continues_like_the_original():
    adam = Adam(0.01)
    params = np.zeros(3)
    for grad in ([1.0, -2.0, 0.5], [0.3, 0.1, -1.0]):
        params = adam.step(params, np.array(grad))
    state = json.loads(json.dumps(adam.state()))
    restored = restore_optimizer(state)
    grad = np.array([0.2, 0.2, -0.4])
    assert np.array_equal(restored.step(params, grad), adam.step(params, grad))
    assert restored.steps == 3


def test_restore_sgd_keeps_learning_rate_and_steps():
    sgd = SGD(0.1)
    sgd.step(np.zeros(2), np.ones(2))
    restored = restore_optimizer(sgd.state())
    assert isinstance(restored, SGD)
    assert (restored.learning_rate, restored.steps) == (0.1, 1)


def test_restore_unknown_optimizer_raises():
    with pytest.raises(ConfigError):
        restore_optimizer({"kind": "rmsprop", "learning_rate": 0.1, "steps": 0})
