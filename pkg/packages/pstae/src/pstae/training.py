"""Training loops: extractor pretraining on action clips, autoencoder training on normal clips."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, Field
from whenever import Instant

from pstae.loss import reconstruction_loss
from pstae_core.errors import ConfigurationError, UsageError
from pstae_core.optim import sgd_step
from pstae_core.tensor import DTensor, cross_entropy, no_grad
from pstnet.layers import FeaturedClip
from pstnet.network import ActionHead, ActionNet

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from pstae_core.optim import SgdConfig
    from pstnet.network import PSTAE, Extractor

logger = logging.getLogger(__name__)


class EpochSummary(BaseModel):
    epoch: int
    mean_loss: float
    learning_rate: float
    wall_seconds: float
    accuracy: float | None = None


class TrainReport(BaseModel):
    started_at: str = Field(description="ISO-8601 UTC start time")
    epochs: list[EpochSummary] = Field(default_factory=list)
    steps: int = 0
    step_losses: list[float] = Field(default_factory=list, description="Mean loss of every batch")
    checkpoint: str | None = None

    @property
    def initial_loss(self) -> float:
        return self.step_losses[0] if self.step_losses else float("nan")

    @property
    def final_loss(self) -> float:
        return self.step_losses[-1] if self.step_losses else float("nan")


def descriptors(extractor: Extractor, points: np.ndarray) -> FeaturedClip:
    """Extractor output with constant features; nothing upstream of it receives gradients."""
    with no_grad():
        clip = extractor(points)
    assert clip.features is not None
    return FeaturedClip(coords=clip.coords, features=tuple(f.detach() for f in clip.features))


def _batches(n: int, size: int, rng: np.random.Generator) -> list[np.ndarray]:
    order = rng.permutation(n)
    return [order[i : i + size] for i in range(0, n, size)]


def _run_epochs(
    sgd: SgdConfig,
    num_items: int,
    params: list[DTensor],
    batch_loss: Callable[[np.ndarray], DTensor],
    *,
    seed: int,
    max_steps: int | None,
    report: TrainReport,
    label: str,
    on_epoch_end: Callable[[], float | None] | None = None,
) -> None:
    rng = np.random.default_rng(seed)
    for epoch in range(1, sgd.epochs + 1):
        start = Instant.now()
        losses = []
        lr = sgd.learning_rate_at(epoch)
        for batch in _batches(num_items, sgd.batch_size, rng):
            for p in params:
                p.grad = None
            loss = batch_loss(batch)
            loss.backward()
            lr = sgd_step(params, sgd, epoch)
            losses.append(loss.item())
            report.step_losses.append(loss.item())
            report.steps += 1
            logger.debug("%s step %d: loss %.6g", label, report.steps, loss.item())
            if max_steps is not None and report.steps >= max_steps:
                break
        summary = EpochSummary(
            epoch=epoch,
            mean_loss=float(np.mean(losses)),
            learning_rate=lr,
            wall_seconds=(Instant.now() - start).in_seconds(),
            accuracy=on_epoch_end() if on_epoch_end else None,
        )
        report.epochs.append(summary)
        logger.info(
            "%s epoch %d/%d: loss %.6g lr %g (%.1fs)",
            label,
            epoch,
            sgd.epochs,
            summary.mean_loss,
            lr,
            summary.wall_seconds,
        )
        if max_steps is not None and report.steps >= max_steps:
            logger.info("%s stopped after %d steps", label, report.steps)
            break


def train_pstae(
    clips: Sequence[np.ndarray],
    extractor: Extractor,
    model: PSTAE,
    sgd: SgdConfig,
    *,
    seed: int = 0,
    max_steps: int | None = None,
) -> TrainReport:
    """Fit ``model`` to reconstruct the frozen extractor's descriptors of normal ``clips``.

    Each clip is an (L, M, 3) array. Descriptors are computed once per clip; batches of
    ``sgd.batch_size`` clips are drawn in a seeded order every epoch and the batch loss is the
    mean clip reconstruction loss.
    """
    if not clips:
        raise ConfigurationError("no training clips: every training frame was empty or too short")
    if not extractor.is_frozen:
        raise UsageError("the extractor must be pretrained and frozen before training the PSTAE")

    targets = [descriptors(extractor, c) for c in clips]
    params = model.trainable_parameters()
    report = TrainReport(started_at=Instant.now().format_iso())
    logger.info("Training PSTAE on %d clips, %d parameters", len(clips), model.parameter_count())

    def batch_loss(batch: np.ndarray) -> DTensor:
        total: DTensor | None = None
        for i in batch:
            target = targets[int(i)]
            recon = model(target)
            assert target.features is not None and recon.features is not None
            loss = reconstruction_loss(target.features, recon.features)
            total = loss if total is None else total + loss
        assert total is not None
        return total * (1.0 / len(batch))

    _run_epochs(
        sgd,
        len(targets),
        params,
        batch_loss,
        seed=seed,
        max_steps=max_steps,
        report=report,
        label="pstae",
    )
    return report


@dataclass(frozen=True)
class PretrainResult:
    extractor: Extractor
    report: TrainReport
    accuracy: float

    @property
    def weights(self) -> dict[str, np.ndarray]:
        """Extractor parameters only; the action head is discarded."""
        return self.extractor.state_dict()


def classify(net: ActionNet, clips: Sequence[np.ndarray]) -> np.ndarray:
    with no_grad():
        return np.asarray([int(np.argmax(net(c).data)) for c in clips], dtype=np.int64)


def pretrain_extractor(
    clips: Sequence[np.ndarray],
    labels: Sequence[int],
    extractor: Extractor,
    sgd: SgdConfig,
    *,
    seed: int = 0,
    hidden_channels: int = 64,
    max_steps: int | None = None,
) -> PretrainResult:
    """Train ``extractor`` plus a throwaway action head with cross-entropy, then freeze it."""
    y = np.asarray(labels, dtype=np.int64)
    if len(clips) != y.shape[0]:
        raise ConfigurationError(f"{len(clips)} clips but {y.shape[0]} labels")
    classes = np.unique(y)
    if classes.size < 2:
        raise ConfigurationError(
            f"pretraining needs at least 2 action classes, got {classes.tolist()}"
        )
    if classes.min() < 0:
        raise ConfigurationError("action labels must be non-negative")

    head = ActionHead(
        extractor.descriptor_dim,
        int(classes.max()) + 1,
        hidden_channels=hidden_channels,
        rng=np.random.default_rng([seed, 1]),
        dtype=extractor.layer.dtype,
    )
    net = ActionNet(extractor, head)
    params = net.trainable_parameters()
    report = TrainReport(started_at=Instant.now().format_iso())

    def batch_loss(batch: np.ndarray) -> DTensor:
        total: DTensor | None = None
        for i in batch:
            loss = cross_entropy(net(clips[int(i)]), int(y[int(i)]))
            total = loss if total is None else total + loss
        assert total is not None
        return total * (1.0 / len(batch))

    def accuracy() -> float:
        return float(np.mean(classify(net, clips) == y))

    _run_epochs(
        sgd,
        len(clips),
        params,
        batch_loss,
        seed=seed,
        max_steps=max_steps,
        report=report,
        label="pretrain",
        on_epoch_end=accuracy,
    )
    final = report.epochs[-1].accuracy
    assert final is not None
    extractor.freeze()
    logger.info("Extractor pretrained: train accuracy %.3f", final)
    return PretrainResult(extractor=extractor, report=report, accuracy=final)
