import numpy as np
import pytest

from minsumkd.codebook import is_codeword
from minsumkd.decoder import OffsetParameters
from minsumkd.exceptions import ConfigError
from minsumkd.exceptions import NumericalInstabilityError
from minsumkd.loss import LossConfig
from minsumkd.optim import SGD
from minsumkd.trainer import batch_for_step
from minsumkd.trainer import p_study
from minsumkd.trainer import train
from minsumkd.trainer import train_step
from minsumkd.trainer import TrainingConfig
from minsumkd.worker import Worker


def small_config(**changes):
    values = dict(
        snr_grid_db=(2.0, 4.0),
        examples_per_snr=5,
        learning_rate=0.05,
        epochs=2,
        batches_per_epoch=3,
        t_teacher=4,
        t_student=2,
        loss_cfg=LossConfig(p=4, t_o=2),
        validation_snr_db=3.0,
        validation_frames=200,
        seed=3,
    )
    values.update(changes)
    return TrainingConfig(**values)


class TestTrainingConfig:
    def test_batch_size_is_derived(self):
        assert small_config().batch_size == 10

    def test_batch_size_must_match_grid(self):
        with pytest.raises(ConfigError):
            small_config(batch_size=11)

    def test_teacher_must_cover_look_ahead(self):
        with pytest.raises(ConfigError):
            small_config(t_teacher=3)

    def test_empty_grid_raises(self):
        with pytest.raises(ConfigError):
            small_config(snr_grid_db=())

    def test_unknown_optimizer_raises(self):
        with pytest.raises(ConfigError):
            small_config(optimizer="rmsprop")

    def test_dict_round_trip(self):
        cfg = small_config()
        assert TrainingConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()

    def test_replace_keeps_other_values(self):
        cfg = small_config().replace(epochs=7)
        assert cfg.epochs == 7
        assert cfg.t_student == 2


class TestBatches:
    def test_batch_holds_examples_per_snr(self, hamming74):
        batch = batch_for_step(hamming74, small_config(), 0)
        assert len(batch) == 10
        assert batch.llr.shape == (10, 7)
        assert batch.snr_db.tolist() == [2.0] * 5 + [4.0] * 5
        assert is_codeword(hamming74.h, batch.bits).all()

    def test_batch_depends_only_on_seed_and_step(self, hamming74):
        cfg = small_config()
        first = batch_for_step(hamming74, cfg, 4)
        again = batch_for_step(hamming74, cfg, 4)
        other = batch_for_step(hamming74, cfg, 5)
        assert np.array_equal(first.llr, again.llr)
        assert not np.array_equal(first.llr, other.llr)


class TestTrainStep:
    def test_worker_count_does_not_change_the_update(self, hamming74):
        cfg = small_config(examples_per_snr=30)
        batch = batch_for_step(hamming74, cfg, 0)
        beta = OffsetParameters(np.full((2, 12), 0.1))
        serial, serial_loss = train_step(batch, beta, hamming74.graph, cfg, SGD(0.05))
        with Worker(3) as worker:
            pooled, pooled_loss = train_step(
                batch, beta, hamming74.graph, cfg, SGD(0.05), worker=worker
            )
        assert np.array_equal(serial.beta, pooled.beta)
        assert serial_loss.total == pooled_loss.total

    def test_loss_is_batch_mean(self, hamming74):
        cfg = small_config()
        batch = batch_for_step(hamming74, cfg, 0)
        _, breakdown = train_step(
            batch, OffsetParameters.zeros(2, 12), hamming74.graph, cfg, SGD(0.05)
        )
        assert breakdown.per_example.shape == (10,)
        assert breakdown.per_example.mean() == pytest.approx(breakdown.total)

    def test_zero_learning_rate_leaves_offsets_unchanged(self, hamming74, small_offsets):
        cfg = small_config(learning_rate=0.0, t_student=3, t_teacher=5)
        batch = batch_for_step(hamming74, cfg, 0)
        updated, breakdown = train_step(batch, small_offsets, hamming74.graph, cfg, SGD(0.0))
        assert np.array_equal(updated.beta, small_offsets.beta)
        assert breakdown.total > 0

    def test_small_step_does_not_increase_cross_entropy(self, hamming74, small_offsets):
        cfg = small_config(
            t_student=3, t_teacher=3, loss_cfg=LossConfig(terms=["ce"]), learning_rate=1e-4
        )
        batch = batch_for_step(hamming74, cfg, 0)
        graph = hamming74.graph
        stepped, before = train_step(batch, small_offsets, graph, cfg, SGD(1e-4))
        _, after = train_step(batch, stepped, graph, cfg, SGD(0.0))
        assert not np.array_equal(stepped.beta, small_offsets.beta)
        assert after.total <= before.total

    def test_one_step_from_zero_moves_some_offset(self, hamming74):
        cfg = small_config()
        batch = batch_for_step(hamming74, cfg, 0)
        updated, _ = train_step(
            batch, OffsetParameters.zeros(2, 12), hamming74.graph, cfg, SGD(cfg.learning_rate)
        )
        assert np.count_nonzero(updated.beta) > 0

    def test_non_finite_update_raises(self, mocker, hamming74):
        cfg = small_config()
        optimizer = mocker.MagicMock()
        optimizer.step.return_value = np.full((2, 12), np.nan)
        with pytest.raises(NumericalInstabilityError) as err:
            train_step(
                batch_for_step(hamming74, cfg, 0),
                OffsetParameters.zeros(2, 12),
                hamming74.graph,
                cfg,
                optimizer,
                step=9,
            )
        assert err.value.step == 9


class TestTrain:
    def test_zero_epochs_returns_zero_offsets(self, hamming74):
        result = train(hamming74, small_config(epochs=0))
        assert not result.checkpoint.beta.beta.any()
        assert result.checkpoint.step == 0
        assert result.history == []

    def test_history_and_events(self, mocker, hamming74):
        event_logger = mocker.MagicMock()
        progress = mocker.MagicMock()
        result = train(hamming74, small_config(), event_logger=event_logger, progress=progress)
        assert [h["epoch"] for h in result.history] == [0, 1, 2]
        assert result.history[0]["best"]
        assert result.checkpoint.history == result.history
        assert result.checkpoint.step in (0, 3, 6)
        events = [c.args[0]["event"] for c in event_logger.info.call_args_list]
        assert events.count("step") == 6
        assert events.count("epoch") == 3
        assert progress.call_count == 6
        assert not (result.diverged or result.interrupted or result.stopped_early)

    def test_same_seed_gives_same_offsets(self, hamming74):
        first = train(hamming74, small_config(epochs=1))
        second = train(hamming74, small_config(epochs=1))
        assert first.checkpoint.to_bytes() == second.checkpoint.to_bytes()

    def test_should_stop_interrupts(self, hamming74):
        result = train(hamming74, small_config(), should_stop=lambda: True)
        assert result.interrupted
        assert [h["epoch"] for h in result.history] == [0]

    def test_divergence_keeps_best_offsets(self, mocker, hamming74):
        mocker.patch(
            "minsumkd.trainer.train_step",
            side_effect=NumericalInstabilityError("Loss is not finite.", step=0),
        )
        result = train(hamming74, small_config())
        assert result.diverged
        assert result.checkpoint.step == 0
        assert not result.checkpoint.beta.beta.any()

    def test_stops_early_without_improvement(self, mocker, hamming74):
        mocker.patch(
            "minsumkd.trainer.validation_ber", side_effect=[0.1, 0.2, 0.3, 0.4, 0.5]
        )
        result = train(hamming74, small_config(epochs=4, early_stop_patience=2))
        assert result.stopped_early
        assert [h["epoch"] for h in result.history] == [0, 1, 2]
        assert result.history[1]["degraded"]
        assert result.checkpoint.step == 0


    def test_sparse_only_run_records_degrading_epochs(self, mocker, hamming74):
        mocker.patch(
            "minsumkd.trainer.validation_ber", side_effect=[0.01, 0.008, 0.02, 0.05, 0.1]
        )
        cfg = small_config(
            epochs=4, early_stop_patience=2, loss_cfg=LossConfig(terms=["sparse"], p=4, t_o=2)
        )
        result = train(hamming74, cfg)
        assert [h["degraded"] for h in result.history] == [False, False, True, True]
        assert result.stopped_early
        assert result.checkpoint.step == 3
        assert result.checkpoint.history == result.history


def test_p_study_has_one_row_per_order(hamming74):
    table = p_study(hamming74, small_config(epochs=1), [2, 4])
    assert table["p"].tolist() == [2, 4]
    assert list(table.columns) == ["p", "validation_ber", "epochs", "diverged"]
    assert not table["diverged"].any()
