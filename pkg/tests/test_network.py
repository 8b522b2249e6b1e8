"""Numerics of the predictor: gates, softmax, dropout, Adam, BPTT, training."""

import math

import numpy as np
import pytest

import nextword as nw
from nextword.network import LstmLayerParams, evaluate, greedy_ids, init_params


def small_params(seed=0, vocab=12, dim=6, hidden=8):
    rng = np.random.default_rng(seed)
    emb = rng.normal(0.0, 0.5, (vocab, dim))
    emb[nw.UNKNOWN_ID] = 0.0
    return init_params(emb, hidden, rng), rng


def loss_of(params, ctx, tgt, masks=None, rate=0.0):
    mode = "train" if masks is not None else "eval"
    probs, _ = nw.forward(params, ctx, mode=mode, dropout_rate=rate, masks=masks)
    return nw.cross_entropy(probs, tgt)


def fd_gradients(params, ctx, tgt, masks=None, rate=0.0, step=1e-5):
    out = {}
    for key, arr in params.trainable().items():
        fd = np.zeros_like(arr)
        flat, fdf = arr.reshape(-1), fd.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            hi = loss_of(params, ctx, tgt, masks, rate)
            flat[i] = orig - step
            lo = loss_of(params, ctx, tgt, masks, rate)
            flat[i] = orig
            fdf[i] = (hi - lo) / (2 * step)
        out[key] = fd
    return out


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-8)


class TestLstmStep:
    def test_all_zero(self):
        layer = LstmLayerParams(np.zeros((8, 3)), np.zeros((8, 2)), np.zeros(8))
        h, c = nw.lstm_step(layer, np.zeros(3), np.zeros(2), np.zeros(2))
        assert np.all(h == 0) and np.all(c == 0)

    def test_zero_params_halve_cell(self):
        # sigmoid(0) = 0.5 forget gate, zero input contribution
        layer = LstmLayerParams(np.zeros((8, 3)), np.zeros((8, 2)), np.zeros(8))
        c0 = np.array([0.4, -1.2])
        _, c = nw.lstm_step(layer, np.zeros(3), np.zeros(2), c0)
        assert np.allclose(c, 0.5 * c0, atol=1e-15)

    def test_matches_scalar_reference(self):
        rng = np.random.default_rng(11)
        hidden, in_dim = 3, 4
        layer = LstmLayerParams(
            rng.normal(size=(4 * hidden, in_dim)),
            rng.normal(size=(4 * hidden, hidden)),
            rng.normal(size=4 * hidden),
        )
        x = rng.normal(size=in_dim)
        h_prev = rng.normal(size=hidden)
        c_prev = rng.normal(size=hidden)
        h, c = nw.lstm_step(layer, x, h_prev, c_prev)

        def sig(v):
            return 1.0 / (1.0 + math.exp(-v))

        for k in range(hidden):
            def act(row):
                return (
                    sum(layer.w[row, m] * x[m] for m in range(in_dim))
                    + sum(layer.u[row, m] * h_prev[m] for m in range(hidden))
                    + layer.b[row]
                )

            gi = sig(act(k))
            gf = sig(act(hidden + k))
            go = sig(act(2 * hidden + k))
            gg = math.tanh(act(3 * hidden + k))
            ck = gf * c_prev[k] + gi * gg
            hk = go * math.tanh(ck)
            assert abs(c[k] - ck) < 1e-12
            assert abs(h[k] - hk) < 1e-12

    def test_dimension_mismatch(self):
        layer = LstmLayerParams(np.zeros((8, 3)), np.zeros((8, 2)), np.zeros(8))
        with pytest.raises(ValueError):
            nw.lstm_step(layer, np.zeros(5), np.zeros(2), np.zeros(2))


class TestSoftmax:
    def test_uniform(self):
        assert np.allclose(nw.softmax(np.array([2.0, 2.0, 2.0])), 1 / 3)

    def test_known_values(self):
        probs = nw.softmax(np.array([0.0, np.log(3.0)]))
        assert np.allclose(probs, [0.25, 0.75])

    def test_shift_invariance_bitwise(self):
        logits = np.array([0.0, 0.25, -1.5, 2.75])  # dyadic, shifts are exact
        assert np.array_equal(nw.softmax(logits), nw.softmax(logits + 4.0))

    def test_normalization_batched(self):
        rng = np.random.default_rng(0)
        logits = rng.normal(0, 10, (32, 50))
        probs = nw.softmax(logits)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
        assert np.all(probs > 0)


class TestCrossEntropy:
    def test_certain_prediction(self):
        assert nw.cross_entropy(np.array([0.0, 1.0]), 1) == 0.0

    def test_uniform_is_log_vocab(self):
        v = 12444
        probs = np.full(v, 1.0 / v)
        assert nw.cross_entropy(probs, 7) == pytest.approx(math.log(v))

    def test_clamped_at_floor(self):
        assert nw.cross_entropy(np.array([1.0, 0.0]), 1) == pytest.approx(-math.log(1e-12))

    def test_nonnegative(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            p = nw.softmax(rng.normal(size=9))
            assert nw.cross_entropy(p, int(rng.integers(9))) >= 0.0


class TestDropout:
    def test_rate_zero_identity(self):
        x = np.arange(6.0)
        for mode in ("train", "eval"):
            y, mask = nw.dropout(x, 0.0, mode, np.random.default_rng(0))
            assert np.array_equal(y, x)
            assert np.all(mask == 1.0)

    def test_eval_identity(self):
        x = np.arange(6.0)
        y, mask = nw.dropout(x, 0.2, "eval")
        assert np.array_equal(y, x)
        assert np.all(mask == 1.0)

    def test_train_mean_preserved(self):
        rng = np.random.default_rng(123)
        x = np.ones(100)
        total = 0.0
        n = 100_000
        for _ in range(n // 100):
            y, _ = nw.dropout(x, 0.2, "train", rng)
            total += y.sum()
        mean = total / n / x.shape[0] * 100
        assert abs(mean - 1.0) < 0.02

    def test_mask_values(self):
        rng = np.random.default_rng(5)
        _, mask = nw.dropout(np.ones(1000), 0.25, "train", rng)
        assert set(np.unique(mask)) <= {0.0, 1.0 / 0.75}

    def test_bad_rate(self):
        with pytest.raises(ValueError):
            nw.dropout(np.ones(3), 1.0, "train", np.random.default_rng(0))


class TestAdam:
    def test_zero_gradient_is_noop(self):
        params, _ = small_params()
        state = nw.AdamState.for_params(params)
        zero = {k: np.zeros_like(a) for k, a in params.trainable().items()}
        new_params, new_state = nw.adam_update(params, zero, state, 0.01)
        for k, a in params.trainable().items():
            assert np.array_equal(new_params.trainable()[k], a)
            assert np.all(new_state.m[k] == 0) and np.all(new_state.v[k] == 0)

    def test_unit_gradient_first_step(self):
        params, _ = small_params()
        state = nw.AdamState.for_params(params)
        ones = {k: np.ones_like(a) for k, a in params.trainable().items()}
        lr = 0.01
        new_params, new_state = nw.adam_update(params, ones, state, lr)
        expected = lr * 1.0 / (1.0 + state.epsilon)  # bias-corrected m_hat = v_hat = 1
        for k, a in params.trainable().items():
            assert np.allclose(a - new_params.trainable()[k], expected, atol=1e-12)
        assert new_state.t == 1

    def test_pure_function(self):
        params, _ = small_params(3)
        state = nw.AdamState.for_params(params)
        grads = {k: np.full_like(a, 0.3) for k, a in params.trainable().items()}
        before = {k: a.copy() for k, a in params.trainable().items()}
        p1, s1 = nw.adam_update(params, grads, state, 0.05)
        p2, s2 = nw.adam_update(params, grads, state, 0.05)
        for k in before:
            assert np.array_equal(params.trainable()[k], before[k])  # untouched
            assert np.array_equal(p1.trainable()[k], p2.trainable()[k])
            assert np.array_equal(s1.m[k], s2.m[k])

    def test_non_finite_gradient_aborts(self):
        params, _ = small_params()
        state = nw.AdamState.for_params(params)
        grads = {k: np.zeros_like(a) for k, a in params.trainable().items()}
        grads["dense1.w"][0, 0] = np.nan
        with pytest.raises(FloatingPointError, match="dense1.w"):
            nw.adam_update(params, grads, state, 0.01)


class TestForward:
    def test_probs_are_distribution(self):
        params, rng = small_params(2)
        ctx = rng.integers(0, 12, (5, 3))
        probs, _ = nw.forward(params, ctx)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
        assert np.all((probs > 0) & (probs < 1))

    def test_eval_deterministic(self):
        params, rng = small_params(4)
        ctx = rng.integers(0, 12, 3)
        p1, _ = nw.forward(params, ctx)
        p2, _ = nw.forward(params, ctx)
        assert np.array_equal(p1, p2)

    def test_uniform_logits_give_uniform_probs(self):
        params, rng = small_params(5)
        zeroed = params.with_trainable(
            {"output.w": np.zeros_like(params.output.w), "output.b": np.zeros_like(params.output.b)}
        )
        probs, _ = nw.forward(zeroed, rng.integers(0, 12, 3))
        assert np.allclose(probs, 1.0 / 12, atol=1e-15)

    def test_id_out_of_range(self):
        params, _ = small_params()
        with pytest.raises(ValueError, match="out of range"):
            nw.forward(params, np.array([0, 1, 99]))
        with pytest.raises(ValueError, match="out of range"):
            nw.forward(params, np.array([-1, 1, 2]))


class TestBackward:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_finite_differences(self, seed):
        params, rng = small_params(seed)
        ctx = rng.integers(0, 12, 3)
        tgt = int(rng.integers(0, 12))
        _, cache = nw.forward(params, ctx)
        grads = nw.backward(params, cache, tgt)
        fd = fd_gradients(params, ctx, tgt)
        for key in grads:
            assert rel_err(grads[key], fd[key]) < 1e-4, key

    def test_matches_finite_differences_with_fixed_dropout(self):
        params, rng = small_params(60)
        ctx = rng.integers(0, 12, 3)
        tgt = int(rng.integers(0, 12))
        _, cache = nw.forward(params, ctx, mode="train", dropout_rate=0.3, rng=rng)
        masks = cache.masks()
        grads = nw.backward(params, cache, tgt)
        fd = fd_gradients(params, ctx, tgt, masks=masks, rate=0.3)
        for key in grads:
            assert rel_err(grads[key], fd[key]) < 1e-4, key

    def test_zeroed_units_get_zero_gradients(self):
        params, rng = small_params(61)
        ctx = rng.integers(0, 12, 3)
        _, cache = nw.forward(params, ctx, mode="train", dropout_rate=0.5, rng=rng)
        grads = nw.backward(params, cache, 4)
        dead = np.flatnonzero(cache.drop3[0] == 0.0)  # units dropped after dense1
        assert dead.size > 0
        # dense2 never saw those activations, so its columns carry no gradient
        assert np.all(grads["dense2.w"][:, dead] == 0.0)

    def test_no_embedding_gradient(self):
        params, rng = small_params(62)
        _, cache = nw.forward(params, rng.integers(0, 12, 3))
        grads = nw.backward(params, cache, 1)
        assert "embedding" not in grads

    def test_batch_gradient_is_mean(self):
        params, rng = small_params(63)
        ctxs = rng.integers(0, 12, (4, 3))
        tgts = rng.integers(0, 12, 4)
        _, cache = nw.forward(params, ctxs)
        batch = nw.backward(params, cache, tgts)
        summed = {k: np.zeros_like(v) for k, v in batch.items()}
        for row in range(4):
            _, c1 = nw.forward(params, ctxs[row])
            g1 = nw.backward(params, c1, int(tgts[row]))
            for k in summed:
                summed[k] += g1[k] / 4
        for k in batch:
            assert np.allclose(batch[k], summed[k], atol=1e-12)

    def test_descent_step_with_fd_gradient(self):
        params, rng = small_params(64)
        ctx = rng.integers(0, 12, 2)
        tgt = int(rng.integers(0, 12))
        fd = fd_gradients(params, ctx, tgt)
        state = nw.AdamState.for_params(params)
        new_params, _ = nw.adam_update(params, fd, state, 1e-3)
        assert loss_of(new_params, ctx, tgt) < loss_of(params, ctx, tgt)


def tiny_windows(n=24, vocab=10, length=3, seed=0):
    rng = np.random.default_rng(seed)
    ids = rng.integers(1, vocab, n + length)
    return nw.make_windows(nw.EncodedCorpus(ids, None), length), vocab


class TestTrain:
    def cfg(self, **kw):
        base = dict(
            context_length=3,
            hidden_size=6,
            embedding_dim=5,
            dropout_rate=0.1,
            learning_rate=1e-3,
            epochs=3,
            batch_size=8,
            seed=7,
        )
        base.update(kw)
        return nw.NetworkConfig(**base)

    def embedding(self, vocab, dim=5, seed=1):
        emb = np.random.default_rng(seed).normal(0, 0.3, (vocab, dim))
        emb[nw.UNKNOWN_ID] = 0.0
        return emb

    def test_zero_learning_rate_keeps_params_bitwise(self):
        windows, vocab = tiny_windows()
        emb = self.embedding(vocab)
        cfg = self.cfg(learning_rate=0.0)
        params, _ = nw.train(windows, emb, cfg)
        fresh = init_params(emb, cfg.hidden_size, np.random.default_rng(cfg.seed))
        for k, a in params.trainable().items():
            assert np.array_equal(a, fresh.trainable()[k])

    def test_same_seed_same_history(self):
        windows, vocab = tiny_windows()
        emb = self.embedding(vocab)
        _, h1 = nw.train(windows, emb, self.cfg())
        _, h2 = nw.train(windows, emb, self.cfg())
        assert h1.loss == h2.loss
        assert h1.accuracy == h2.accuracy

    def test_embedding_frozen(self):
        windows, vocab = tiny_windows()
        emb = self.embedding(vocab)
        before = emb.copy()
        params, _ = nw.train(windows, emb, self.cfg())
        assert np.array_equal(params.embedding, before)
        assert np.array_equal(emb, before)

    def test_history_lengths(self):
        windows, vocab = tiny_windows()
        _, hist = nw.train(windows, self.embedding(vocab), self.cfg(epochs=4))
        assert len(hist.loss) == len(hist.accuracy) == 4

    def test_non_finite_loss_aborts_with_location(self):
        windows, vocab = tiny_windows()
        emb = self.embedding(vocab)
        emb[3, :] = np.nan  # poisons every forward pass that touches word 3
        with np.errstate(all="ignore"):
            with pytest.raises(RuntimeError, match=r"epoch \d+, batch \d+"):
                nw.train(windows, emb, self.cfg(epochs=2))

    def test_mismatched_embedding_dim(self):
        windows, vocab = tiny_windows()
        with pytest.raises(ValueError, match="dim"):
            nw.train(windows, self.embedding(vocab, dim=9), self.cfg())


class TestPredictTopk:
    def test_full_permutation_descending(self):
        params, rng = small_params(20)
        ranked = nw.predict_topk(params, rng.integers(0, 12, 3), 12)
        ids = [i for i, _ in ranked]
        probs = [p for _, p in ranked]
        assert sorted(ids) == list(range(12))
        assert probs == sorted(probs, reverse=True)

    def test_probability_mass_bounded(self):
        params, rng = small_params(21)
        ranked = nw.predict_topk(params, rng.integers(0, 12, 3), 5)
        assert sum(p for _, p in ranked) <= 1.0 + 1e-12

    def test_ties_broken_by_lower_id(self):
        params, rng = small_params(22)
        uniform = params.with_trainable(
            {"output.w": np.zeros_like(params.output.w), "output.b": np.zeros_like(params.output.b)}
        )
        ranked = nw.predict_topk(uniform, rng.integers(0, 12, 3), 4)
        assert [i for i, _ in ranked] == [0, 1, 2, 3]

    def test_exclusion_with_backfill(self):
        params, rng = small_params(23)
        uniform = params.with_trainable(
            {"output.w": np.zeros_like(params.output.w), "output.b": np.zeros_like(params.output.b)}
        )
        ctx = rng.integers(0, 12, 3)
        ranked = nw.predict_topk(uniform, ctx, 3, exclude={0, 1})
        assert [i for i, _ in ranked] == [2, 3, 4]
        # excluded ids return only when there are not enough others
        ranked = nw.predict_topk(uniform, ctx, 12, exclude={0, 1})
        assert sorted(i for i, _ in ranked) == list(range(12))

    def test_k_validation(self):
        params, _ = small_params()
        with pytest.raises(ValueError):
            nw.predict_topk(params, np.array([1, 2, 3]), 0)


class TestGreedyIds:
    def test_length_and_determinism(self):
        params, rng = small_params(30)
        seed_ids = rng.integers(0, 12, 4).tolist()
        a = greedy_ids(params, seed_ids, 6, 3)
        b = greedy_ids(params, seed_ids, 6, 3)
        assert len(a) == 6 and a == b

    def test_short_seed_left_padded(self):
        params, _ = small_params(31)
        out = greedy_ids(params, [3], 2, 4)
        assert len(out) == 2

    def test_loop_guard_breaks_period_one_cycle(self):
        params, _ = small_params(32)
        # force a constant argmax: bias one word heavily
        bias = np.zeros_like(params.output.b)
        bias[5] = 50.0
        stuck = params.with_trainable({"output.w": np.zeros_like(params.output.w), "output.b": bias})
        raw = greedy_ids(stuck, [5, 5, 5], 10, 3)
        assert raw == [5] * 10
        guarded = greedy_ids(stuck, [5, 5, 5], 10, 3, loop_guard=True)
        assert any(w != 5 for w in guarded)
