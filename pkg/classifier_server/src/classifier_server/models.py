"""Model registry: anything that maps a batch of RGB images to softmax
probabilities can sit behind the server.

Identifiers:
  tiny                         small seeded convnet, 10 classes (default;
                               needs no downloads, fully deterministic)
  torchvision:<name>           pretrained torchvision model (downloads or
                               reuses cached weights)
  torchvision:<name>@untrained same architecture with seeded random init
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import torch
from PIL import Image
from torch import nn

INIT_SEED = 20240

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class LoadedModel:
    name: str
    num_classes: int
    input_size: int
    _forward: Callable[[torch.Tensor], torch.Tensor]
    _normalize: bool

    def predict(self, images: Sequence[Image.Image]) -> np.ndarray:
        """Softmax probabilities, shape (len(images), num_classes)."""
        batch = torch.stack([self._to_tensor(img) for img in images])
        with torch.inference_mode():
            logits = self._forward(batch)
            probs = torch.softmax(logits, dim=1)
        return probs.cpu().numpy().astype(np.float64)

    def _to_tensor(self, img: Image.Image) -> torch.Tensor:
        img = img.convert("RGB").resize((self.input_size, self.input_size),
                                        Image.BILINEAR)
        t = torch.from_numpy(np.asarray(img, dtype=np.float32) / 255.0)
        t = t.permute(2, 0, 1)
        if self._normalize:
            mean = torch.tensor(IMAGENET_MEAN).view(3, 1, 1)
            std = torch.tensor(IMAGENET_STD).view(3, 1, 1)
            t = (t - mean) / std
        return t


class TinyNet(nn.Module):
    """A deliberately small classifier so the server runs anywhere."""

    def __init__(self, num_classes: int = 10):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv2d(3, 8, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv2d(8, 16, 3, stride=2, padding=1), nn.ReLU(),
            nn.AdaptiveAvgPool2d(1), nn.Flatten(),
        )
        self.head = nn.Linear(16, num_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.features(x))


def load_model(identifier: str) -> LoadedModel:
    if identifier == "tiny":
        with torch.random.fork_rng():
            torch.manual_seed(INIT_SEED)
            net = TinyNet()
        net.eval()
        return LoadedModel(name=identifier, num_classes=10, input_size=32,
                           _forward=net, _normalize=False)

    if identifier.startswith("torchvision:"):
        import torchvision.models as tvm

        name = identifier[len("torchvision:"):]
        untrained = name.endswith("@untrained")
        if untrained:
            name = name[:-len("@untrained")]
        with torch.random.fork_rng():
            torch.manual_seed(INIT_SEED)
            net = tvm.get_model(name, weights=None if untrained else "DEFAULT")
        net.eval()
        num_classes = _probe_num_classes(net)
        return LoadedModel(name=identifier, num_classes=num_classes,
                           input_size=224, _forward=net, _normalize=True)

    raise ValueError(f"unknown model identifier {identifier!r}")


def _probe_num_classes(net: nn.Module) -> int:
    with torch.inference_mode():
        out = net(torch.zeros(1, 3, 224, 224))
    return int(out.shape[1])
