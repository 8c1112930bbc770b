"""The touch-dreaming policy network.

Observations are tokenized per modality: a shared convolutional backbone for
the four camera views, feed-forward featurizers for body and hand states, and
the per-region tactile encoder for each hand. Every modality is compressed to
a fixed number of trunk tokens by cross-attention aggregation with learnable
query ("slot") vectors; aggregation carries no positional encoding, so it is
permutation-invariant over its input features. The trunk is an
encoder-decoder transformer with sinusoidal positions whose decoder emits one
fixed token span per action modality. Each action expert cross-attends only
to its own span and emits an h-step action chunk; the dream experts
cross-attend to the full set of output tokens and emit tau-step future force
and tactile predictions used only as training targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import torch
import torch.nn as nn

from .schema import ActionSchema, IMAGE_VIEWS, ModalitySchema, SchemaError
from .tactile import NUM_REGIONS, TactileEncoder

DREAM_MODES = ("latent", "raw", "none")


@dataclass(frozen=True)
class PolicyConfig:
    schema: ModalitySchema = ModalitySchema()
    action_schema: ActionSchema = ActionSchema()
    d_model: int = 256
    encoder_layers: int = 3
    decoder_layers: int = 3
    heads: int = 4
    ffn_dim: int | None = None  # defaults to 4 * d_model
    image_tokens: int = 4       # per camera view
    state_tokens: int = 2       # per state modality
    tactile_tokens: int = 4     # per hand
    ee_tokens: int = 4
    torso_tokens: int = 2
    velocity_tokens: int = 2
    hand_tokens: int = 4
    latent_dim: int = 64        # d_z, per-region tactile embedding size
    tactile_channels: int = 8
    tactile_fusion_hidden: int = 128
    feature_dim: int = 64       # pre-aggregation feature width for images/states
    lambda_force: float = 1.0
    lambda_tactile: float = 1.0
    beta: float = 0.5           # norm-matching weight inside the tactile dream loss
    huber_delta: float = 1.0
    ema_decay: float = 0.996
    use_touch_inputs: bool = True
    dream_mode: str = "latent"

    def __post_init__(self):
        if self.dream_mode not in DREAM_MODES:
            raise SchemaError(f"dream_mode must be one of {DREAM_MODES}, got {self.dream_mode!r}")
        if not self.use_touch_inputs and self.dream_mode != "none":
            raise SchemaError("dreaming requires touch inputs; set dream_mode='none'")
        token_counts = (
            self.image_tokens, self.state_tokens, self.tactile_tokens,
            self.ee_tokens, self.torso_tokens, self.velocity_tokens, self.hand_tokens,
        )
        if any(t < 1 for t in token_counts):
            raise SchemaError("all token counts must be >= 1")
        if self.d_model % self.heads != 0:
            raise SchemaError("d_model must be divisible by heads")

    @property
    def ffn(self) -> int:
        return self.ffn_dim if self.ffn_dim is not None else 4 * self.d_model

    @property
    def h(self) -> int:
        return self.action_schema.chunk_horizon

    @property
    def tau(self) -> int:
        return self.action_schema.dream_horizon

    def input_token_counts(self) -> dict[str, int]:
        """Per-modality trunk token budget, in concatenation order."""
        counts = {view: self.image_tokens for view in IMAGE_VIEWS}
        counts["body_q"] = self.state_tokens
        counts["hand_q"] = self.state_tokens
        if self.use_touch_inputs:
            counts["hand_force"] = self.state_tokens
            counts["tactile_left"] = self.tactile_tokens
            counts["tactile_right"] = self.tactile_tokens
        return counts

    @property
    def input_tokens(self) -> int:
        return sum(self.input_token_counts().values())

    def output_layout(self) -> "OutputTokenLayout":
        sizes = {
            "end_effector": self.ee_tokens,
            "torso": self.torso_tokens,
            "velocity": self.velocity_tokens,
            "hand": self.hand_tokens,
        }
        spans = {}
        start = 0
        for name in self.action_schema.modality_dims():
            spans[name] = (start, start + sizes[name])
            start += sizes[name]
        return OutputTokenLayout(spans=spans, total=start)

    def to_dict(self) -> dict:
        d = {
            "schema": self.schema.to_dict(),
            "action_schema": self.action_schema.to_dict(),
        }
        for f in (
            "d_model", "encoder_layers", "decoder_layers", "heads", "ffn_dim",
            "image_tokens", "state_tokens", "tactile_tokens",
            "ee_tokens", "torso_tokens", "velocity_tokens", "hand_tokens",
            "latent_dim", "tactile_channels", "tactile_fusion_hidden", "feature_dim",
            "lambda_force", "lambda_tactile", "beta", "huber_delta", "ema_decay",
            "use_touch_inputs", "dream_mode",
        ):
            d[f] = getattr(self, f)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PolicyConfig":
        kwargs = dict(d)
        kwargs["schema"] = ModalitySchema.from_dict(d["schema"])
        kwargs["action_schema"] = ActionSchema.from_dict(d["action_schema"])
        return cls(**kwargs)

    def variant(self, name: str) -> "PolicyConfig":
        """Named ablations of the full model."""
        if name == "dream-latent":
            return replace(self, use_touch_inputs=True, dream_mode="latent")
        if name == "dream-raw":
            return replace(self, use_touch_inputs=True, dream_mode="raw")
        if name == "no-dream":
            return replace(
                self, use_touch_inputs=True, dream_mode="none",
                lambda_force=0.0, lambda_tactile=0.0,
            )
        if name == "no-touch":
            return replace(
                self, use_touch_inputs=False, dream_mode="none",
                lambda_force=0.0, lambda_tactile=0.0,
            )
        raise SchemaError(f"unknown variant {name!r}")

VARIANT_NAMES = ("no-touch", "no-dream", "dream-raw", "dream-latent")


@dataclass(frozen=True)
class OutputTokenLayout:
    """Disjoint decoder-token spans covering all action modalities in order."""

    spans: dict[str, tuple[int, int]]
    total: int

    def __post_init__(self):
        covered = 0
        for name, (a, b) in self.spans.items():
            if a != covered or b <= a:
                raise SchemaError(f"span {name}=({a},{b}) breaks contiguous coverage")
            covered = b
        if covered != self.total:
            raise SchemaError(f"spans cover {covered} tokens, total says {self.total}")

    def slice(self, name: str) -> slice:
        a, b = self.spans[name]
        return slice(a, b)


@dataclass
class PolicyOutput:
    actions: dict[str, torch.Tensor]              # modality -> (B, h, dim)
    force: torch.Tensor | None = None             # (B, tau, 2*J_h)
    tactile_latents: torch.Tensor | None = None   # (B, tau, 12, d_z)
    tactile_raw: torch.Tensor | None = None       # (B, tau, 2, 1062)


def sinusoidal_positions(length: int, dim: int) -> torch.Tensor:
    """Classic fixed sin/cos position table, shape (length, dim)."""
    pos = torch.arange(length, dtype=torch.float64).unsqueeze(1)
    idx = torch.arange(0, dim, 2, dtype=torch.float64)
    angles = pos / torch.pow(10000.0, idx / dim)
    table = torch.zeros(length, dim, dtype=torch.float64)
    table[:, 0::2] = torch.sin(angles)
    table[:, 1::2] = torch.cos(angles[:, : dim - dim // 2])
    return table.to(torch.get_default_dtype())


class CrossAttentionAggregator(nn.Module):
    """Compress a variable-length feature sequence into k learnable-query tokens.

    No positional information is injected, so output tokens are invariant to
    permutations of the input features.
    """

    def __init__(self, num_tokens: int, d_model: int, feature_dim: int, heads: int):
        super().__init__()
        self.queries = nn.Parameter(torch.randn(num_tokens, d_model) * 0.02)
        self.attn = nn.MultiheadAttention(
            d_model, heads, kdim=feature_dim, vdim=feature_dim, batch_first=True
        )
        self.norm = nn.LayerNorm(d_model)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        # features: (B, S, feature_dim) -> (B, num_tokens, d_model)
        if features.dim() != 3:
            raise SchemaError(f"features must be (B, S, F), got {tuple(features.shape)}")
        q = self.queries.unsqueeze(0).expand(features.shape[0], -1, -1)
        out, _ = self.attn(q, features, features, need_weights=False)
        return self.norm(q + out)


class ImageBackbone(nn.Module):
    """Three stride-2 conv blocks; output is a flattened spatial feature sequence."""

    def __init__(self, feature_dim: int):
        super().__init__()
        self.net = nn.Sequential(
            nn.Conv2d(3, 16, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv2d(16, 32, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv2d(32, feature_dim, 3, stride=2, padding=1), nn.ReLU(),
        )

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        # images: (B, H, W, 3) in [0, 1] -> (B, S, feature_dim)
        x = images.permute(0, 3, 1, 2)
        feat = self.net(x)
        return feat.flatten(2).transpose(1, 2)


class StateFeaturizer(nn.Module):
    """Feed-forward features for a flat state vector; emits a length-1 sequence."""

    def __init__(self, in_dim: int, feature_dim: int):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(in_dim, feature_dim), nn.ReLU(), nn.Linear(feature_dim, feature_dim)
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x).unsqueeze(1)


class ChunkExpert(nn.Module):
    """Cross-attention readout emitting a fixed number of per-step vectors."""

    def __init__(self, d_model: int, heads: int, steps: int, out_dim: int):
        super().__init__()
        self.step_queries = nn.Parameter(torch.randn(steps, d_model) * 0.02)
        self.attn = nn.MultiheadAttention(d_model, heads, batch_first=True)
        self.norm1 = nn.LayerNorm(d_model)
        self.ff = nn.Sequential(
            nn.Linear(d_model, 2 * d_model), nn.ReLU(), nn.Linear(2 * d_model, d_model)
        )
        self.norm2 = nn.LayerNorm(d_model)
        self.head = nn.Linear(d_model, out_dim)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        # tokens: (B, S, d) -> (B, steps, out_dim)
        q = self.step_queries.unsqueeze(0).expand(tokens.shape[0], -1, -1)
        attn_out, _ = self.attn(q, tokens, tokens, need_weights=False)
        x = self.norm1(q + attn_out)
        x = self.norm2(x + self.ff(x))
        return self.head(x)


class DreamExpert(nn.Module):
    """ChunkExpert over the full output-token set, with an evaluation counter."""

    def __init__(self, d_model: int, heads: int, steps: int, out_dim: int):
        super().__init__()
        self.inner = ChunkExpert(d_model, heads, steps, out_dim)
        self.calls = 0  # plain attribute: not part of the checkpointable state

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        self.calls += 1
        return self.inner(tokens)


class TouchDreamPolicy(nn.Module):
    """Encoder-decoder policy with modular action experts and dream experts."""

    def __init__(self, config: PolicyConfig):
        super().__init__()
        self.config = config
        schema, action_schema = config.schema, config.action_schema
        d, heads, f = config.d_model, config.heads, config.feature_dim
        self.layout = config.output_layout()

        # input tokenizers, in trunk concatenation order
        self.image_backbone = ImageBackbone(f)
        self.image_agg = CrossAttentionAggregator(config.image_tokens, d, f, heads)
        self.body_feat = StateFeaturizer(schema.body_dim, f)
        self.body_agg = CrossAttentionAggregator(config.state_tokens, d, f, heads)
        self.hand_q_feat = StateFeaturizer(schema.hand_dim, f)
        self.hand_q_agg = CrossAttentionAggregator(config.state_tokens, d, f, heads)
        if config.use_touch_inputs:
            self.force_feat = StateFeaturizer(schema.hand_dim, f)
            self.force_agg = CrossAttentionAggregator(config.state_tokens, d, f, heads)
            self.tactile_encoder = TactileEncoder(
                latent_dim=config.latent_dim,
                channels=config.tactile_channels,
                fusion_hidden=config.tactile_fusion_hidden,
            )
            self.tactile_agg = CrossAttentionAggregator(
                config.tactile_tokens, d, config.latent_dim, heads
            )

        enc_layer = nn.TransformerEncoderLayer(
            d, heads, config.ffn, dropout=0.0, batch_first=True, norm_first=True
        )
        self.encoder = nn.TransformerEncoder(
            enc_layer, config.encoder_layers, norm=nn.LayerNorm(d), enable_nested_tensor=False
        )
        dec_layer = nn.TransformerDecoderLayer(
            d, heads, config.ffn, dropout=0.0, batch_first=True, norm_first=True
        )
        self.decoder = nn.TransformerDecoder(dec_layer, config.decoder_layers, norm=nn.LayerNorm(d))
        self.output_queries = nn.Parameter(torch.randn(self.layout.total, d) * 0.02)

        self.register_buffer("enc_pos", sinusoidal_positions(config.input_tokens, d), persistent=False)
        self.register_buffer("dec_pos", sinusoidal_positions(self.layout.total, d), persistent=False)

        self.action_experts = nn.ModuleDict(
            {
                name: ChunkExpert(d, heads, config.h, dim)
                for name, dim in action_schema.modality_dims().items()
            }
        )

        # dream experts are built last so every shared module above consumes
        # the same initializer stream across dream-mode variants
        hand_dim = schema.hand_dim
        if config.dream_mode == "latent":
            self.force_expert = DreamExpert(d, heads, config.tau, hand_dim)
            self.tactile_dream_expert = DreamExpert(
                d, heads, config.tau, 2 * NUM_REGIONS * config.latent_dim
            )
        elif config.dream_mode == "raw":
            self.force_expert = DreamExpert(d, heads, config.tau, hand_dim)
            self.tactile_dream_expert = DreamExpert(d, heads, config.tau, 2 * schema.tactile_dim)
        else:
            self.force_expert = None
            self.tactile_dream_expert = None

    @property
    def dream_call_count(self) -> int:
        total = 0
        for expert in (self.force_expert, self.tactile_dream_expert):
            if expert is not None:
                total += expert.calls
        return total

    def reset_dream_call_count(self) -> None:
        for expert in (self.force_expert, self.tactile_dream_expert):
            if expert is not None:
                expert.calls = 0

    def build_observation_tokens(self, obs: dict[str, torch.Tensor]) -> torch.Tensor:
        """Concatenate per-modality tokens in the fixed trunk order."""
        images = obs["images"]
        B, V = images.shape[0], images.shape[1]
        if V != len(IMAGE_VIEWS):
            raise SchemaError(f"expected {len(IMAGE_VIEWS)} camera views, got {V}")
        expected = self.config.schema.stream_shapes()
        for name in ("body_q", "hand_q") + (
            ("hand_force", "tactile") if self.config.use_touch_inputs else ()
        ):
            if tuple(obs[name].shape) != (B, *expected[name]):
                raise SchemaError(
                    f"stream {name}: expected shape {(B, *expected[name])}, "
                    f"got {tuple(obs[name].shape)}"
                )
        chunks = []
        for v in range(V):
            feats = self.image_backbone(images[:, v])
            chunks.append(self.image_agg(feats))
        chunks.append(self.body_agg(self.body_feat(obs["body_q"])))
        chunks.append(self.hand_q_agg(self.hand_q_feat(obs["hand_q"])))
        if self.config.use_touch_inputs:
            chunks.append(self.force_agg(self.force_feat(obs["hand_force"])))
            for hand in range(2):
                latents = self.tactile_encoder(obs["tactile"][:, hand])
                chunks.append(self.tactile_agg(latents))
        tokens = torch.cat(chunks, dim=1)
        if tokens.shape[1] != self.config.input_tokens:
            raise SchemaError(
                f"built {tokens.shape[1]} tokens, config says {self.config.input_tokens}"
            )
        return tokens

    def trunk(self, obs: dict[str, torch.Tensor]) -> torch.Tensor:
        """Run tokenizers and the encoder-decoder; returns decoder output tokens."""
        tokens = self.build_observation_tokens(obs)
        memory = self.encoder(tokens + self.enc_pos)
        B = tokens.shape[0]
        queries = self.output_queries.unsqueeze(0).expand(B, -1, -1) + self.dec_pos
        return self.decoder(queries, memory)

    def decode_actions(self, decoder_tokens: torch.Tensor) -> dict[str, torch.Tensor]:
        """Each action expert reads only its own decoder-token span."""
        return {
            name: expert(decoder_tokens[:, self.layout.slice(name)])
            for name, expert in self.action_experts.items()
        }

    def decode_dreams(
        self, decoder_tokens: torch.Tensor
    ) -> tuple[torch.Tensor | None, torch.Tensor | None, torch.Tensor | None]:
        """Dream experts read the full output-token set. Returns (force, latents, raw)."""
        cfg = self.config
        if cfg.dream_mode == "none":
            return None, None, None
        B = decoder_tokens.shape[0]
        force = self.force_expert(decoder_tokens)
        if cfg.dream_mode == "latent":
            flat = self.tactile_dream_expert(decoder_tokens)
            latents = flat.reshape(B, cfg.tau, 2 * NUM_REGIONS, cfg.latent_dim)
            return force, latents, None
        flat = self.tactile_dream_expert(decoder_tokens)
        raw = flat.reshape(B, cfg.tau, 2, cfg.schema.tactile_dim)
        return force, None, raw

    def forward(self, obs: dict[str, torch.Tensor], with_dreams: bool = True) -> PolicyOutput:
        decoder_tokens = self.trunk(obs)
        actions = self.decode_actions(decoder_tokens)
        if not with_dreams or self.config.dream_mode == "none":
            return PolicyOutput(actions=actions)
        force, latents, raw = self.decode_dreams(decoder_tokens)
        return PolicyOutput(actions=actions, force=force, tactile_latents=latents, tactile_raw=raw)

    def act(self, obs: dict[str, torch.Tensor]) -> dict[str, torch.Tensor]:
        """Inference entry point: action chunks only, dream experts never run."""
        with torch.no_grad():
            return self.forward(obs, with_dreams=False).actions
