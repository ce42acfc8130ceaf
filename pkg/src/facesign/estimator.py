"""Scikit-learn style estimators wrapping the landmark pipeline.

`SequencePadder`, `NoseTipNormalizer`, and `LandmarkVectorizer` are stateless
transformers over lists of `LandmarkSequence`; chained in an sklearn
Pipeline they turn raw sequences into the (n, T, D) arrays the classifier
consumes. `SentenceTypeClassifier` owns the training loop (seeded shuffling,
minibatch gradients, adaptive-moment updates, per-epoch history) and keeps
the parameters from the epoch with the best validation accuracy.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import nn, preprocess
from .errors import ShapeError
from .landmarks import LandmarkSequence
from .validation import check_feature_array, check_labels, check_sequences


class SequencePadder(TransformerMixin, BaseEstimator):
    """Pad (or truncate) every sequence to a fixed frame count."""

    def __init__(self, target_length: int = preprocess.TARGET_LENGTH):
        self.target_length = target_length

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> List[LandmarkSequence]:
        return [preprocess.pad_to_length(s, self.target_length) for s in check_sequences(X)]


class NoseTipNormalizer(TransformerMixin, BaseEstimator):
    """Nose-tip translation + unit mean-distance scaling, per frame."""

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> List[LandmarkSequence]:
        return [preprocess.normalize_sequence(s) for s in check_sequences(X)]


class LandmarkVectorizer(TransformerMixin, BaseEstimator):
    """Stack padded, normalized sequences into an (n, T, D) float64 array."""

    def __init__(self, expected_length: int = preprocess.TARGET_LENGTH):
        self.expected_length = expected_length

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        seqs = check_sequences(X)
        return np.stack(
            [preprocess.to_feature_tensor(s, self.expected_length) for s in seqs]
        )


class SegmentPermutationAugmenter(BaseEstimator):
    """Training-set expansion via segment permutation (resampler interface).

    Not a transformer: output sample count differs from the input and labels
    travel with their sequences, so the entry point is `fit_resample`.
    """

    def __init__(self, copies_per_sample: int = 4, min_segments: int = 2,
                 max_segments: int = 5, seed: int = 0):
        self.copies_per_sample = copies_per_sample
        self.min_segments = min_segments
        self.max_segments = max_segments
        self.seed = seed

    def fit_resample(self, X, y) -> Tuple[List[LandmarkSequence], List]:
        seqs = check_sequences(X)
        labels = list(y)
        if len(labels) != len(seqs):
            raise ShapeError(f"got {len(seqs)} sequences but {len(labels)} labels")
        cfg = preprocess.AugmentConfig(
            copies_per_sample=self.copies_per_sample,
            min_segments=self.min_segments,
            max_segments=self.max_segments,
            seed=self.seed,
        )
        expanded = preprocess.augment(list(zip(seqs, labels)), cfg)
        return [s for s, _ in expanded], [l for _, l in expanded]


class SentenceTypeClassifier(ClassifierMixin, BaseEstimator):
    """Temporal-conv classifier over stacked feature tensors.

    fit(X, y) expects X of shape (n_samples, T, D); input dimensions are
    inferred from the data. Pass ``validation_data=(X_val, y_val)`` to select
    the parameters from the epoch with the highest validation accuracy
    (ties resolved toward the later epoch); otherwise the final epoch wins.
    """

    def __init__(
        self,
        conv_filters: int = 16,
        kernel_size: int = 5,
        hidden_units: int = 64,
        epochs: int = 50,
        batch_size: int = 16,
        learning_rate: float = 1e-4,
        seed: int = 0,
        shuffle_seed: int = 0,
    ):
        self.conv_filters = conv_filters
        self.kernel_size = kernel_size
        self.hidden_units = hidden_units
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed
        self.shuffle_seed = shuffle_seed

    def fit(self, X, y, validation_data: Optional[Tuple] = None):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        X = check_feature_array(X)
        n, t, d = X.shape
        y = check_labels(y, n)
        if validation_data is not None:
            X_val = check_feature_array(validation_data[0], expected_length=t, expected_dim=d)
            y_val = check_labels(validation_data[1], X_val.shape[0])
        else:
            X_val = y_val = None

        cfg = nn.ClassifierConfig(
            input_channels=d,
            input_length=t,
            conv_filters=self.conv_filters,
            kernel_size=self.kernel_size,
            hidden_units=self.hidden_units,
            seed=self.seed,
        )
        params = nn.init_params(cfg)
        state = nn.AdamState.zeros(params)

        history: List[dict] = []
        best_params = params
        best_acc = -1.0
        adam_t = 0
        for epoch in range(1, self.epochs + 1):
            order = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence((self.shuffle_seed, epoch)))
            ).permutation(n)
            loss_sum = 0.0
            for start in range(0, n, self.batch_size):
                idx = order[start : start + self.batch_size]
                logits, cache = nn.forward_batch(cfg, params, X[idx])
                losses, dlogits = nn.softmax_cross_entropy_batch(logits, y[idx])
                loss_sum += float(losses.sum())
                grads = nn.backward_batch(cfg, params, cache, dlogits / idx.size)
                adam_t += 1
                params, state = nn.adam_step(params, grads, state, self.learning_rate, adam_t)
            record = {"epoch": epoch, "train_loss": loss_sum / n}
            if X_val is not None:
                val_acc = float(np.mean(self._predict_with(cfg, params, X_val) == y_val))
                record["val_accuracy"] = val_acc
                if val_acc >= best_acc:
                    best_acc = val_acc
                    best_params = params
            else:
                record["val_accuracy"] = None
                best_params = params
            history.append(record)

        self.config_ = cfg
        self.params_ = best_params
        self.final_params_ = params
        self.history_ = history
        self.classes_ = np.arange(nn.NUM_CLASSES)
        return self

    @staticmethod
    def _predict_with(cfg, params, X, chunk: int = 64) -> np.ndarray:
        preds = np.empty(X.shape[0], dtype=np.intp)
        for start in range(0, X.shape[0], chunk):
            logits, _ = nn.forward_batch(cfg, params, X[start : start + chunk])
            preds[start : start + chunk] = np.argmax(logits, axis=1)
        return preds

    def _check_fitted(self):
        if not hasattr(self, "params_"):
            raise NotFittedError(
                "this SentenceTypeClassifier instance is not fitted yet"
            )

    def decision_function(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_feature_array(
            X,
            expected_length=self.config_.input_length,
            expected_dim=self.config_.input_channels,
        )
        out = np.empty((X.shape[0], nn.NUM_CLASSES))
        for start in range(0, X.shape[0], 64):
            logits, _ = nn.forward_batch(self.config_, self.params_, X[start : start + 64])
            out[start : start + 64] = logits
        return out

    def predict_proba(self, X) -> np.ndarray:
        return nn.softmax(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)
