"""Engine configuration: one JSON config file, env overrides, flag overrides.

Precedence is flags > environment > config file > defaults. Documented keys:

  segment.max_tokens   segment.overlap
  fusion.w_lex         fusion.w_sem       fusion.arm_k      fusion.final_k
  embed.dim            index.quantize
  backend.timeout      backend.max_new_tokens   backend.repetition_penalty
  serve.cors_origins

Backend endpoints come from VERIFAI_EMBED_URL / VERIFAI_GEN_URL /
VERIFAI_NLI_URL (absence selects the reference backends).
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .backends import DEFAULT_EMBED_DIM, BackendConfig
from .fusion import FusionConfig
from .segmenter import SegmenterConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    segment: SegmenterConfig = field(default_factory=SegmenterConfig)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    embed_dim: int = DEFAULT_EMBED_DIM
    quantize: bool = True
    evidence_n: int = 1
    backend: BackendConfig = field(default_factory=BackendConfig)
    cors_origins: tuple[str, ...] = ()


def load_config(path: Path | None = None) -> EngineConfig:
    """Build an EngineConfig from an optional JSON config file."""
    if path is None:
        return EngineConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return config_from_mapping(raw, where=str(path))


def config_from_mapping(raw: Mapping, where: str = "config") -> EngineConfig:
    def section(name: str) -> Mapping:
        sec = raw.get(name, {})
        if not isinstance(sec, Mapping):
            raise ConfigError(f"{where}: section {name!r} must be an object")
        return sec

    seg = section("segment")
    fus = section("fusion")
    emb = section("embed")
    idx = section("index")
    bck = section("backend")
    srv = section("serve")
    try:
        return EngineConfig(
            segment=SegmenterConfig(
                max_tokens=int(seg.get("max_tokens", 512)),
                overlap=int(seg.get("overlap", 100))),
            fusion=FusionConfig(
                w_lex=float(fus.get("w_lex", 0.5)),
                w_sem=float(fus.get("w_sem", 0.5)),
                arm_k=int(fus.get("arm_k", 100)),
                final_k=int(fus.get("final_k", 10))),
            embed_dim=int(emb.get("dim", DEFAULT_EMBED_DIM)),
            quantize=bool(idx.get("quantize", True)),
            evidence_n=int(raw.get("evidence_n", 1)),
            backend=BackendConfig(
                timeout=float(bck.get("timeout", 30.0)),
                max_new_tokens=int(bck.get("max_new_tokens", 1000)),
                repetition_penalty=float(bck.get("repetition_penalty", 1.1))),
            cors_origins=tuple(srv.get("cors_origins", ())),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def apply_overrides(cfg: EngineConfig, **kwargs) -> EngineConfig:
    """Apply CLI flag overrides; None values leave the config untouched."""
    seg, fus = cfg.segment, cfg.fusion
    if kwargs.get("max_tokens") is not None or kwargs.get("overlap") is not None:
        seg = SegmenterConfig(
            max_tokens=kwargs.get("max_tokens") or seg.max_tokens,
            overlap=seg.overlap if kwargs.get("overlap") is None else kwargs["overlap"])
    fusion_fields = {}
    for name in ("w_lex", "w_sem", "arm_k", "final_k"):
        if kwargs.get(name) is not None:
            fusion_fields[name] = kwargs[name]
    if fusion_fields:
        base = {"w_lex": fus.w_lex, "w_sem": fus.w_sem,
                "arm_k": fus.arm_k, "final_k": fus.final_k}
        base.update(fusion_fields)
        fus = FusionConfig(**base)
    out = replace(cfg, segment=seg, fusion=fus)
    if kwargs.get("quantize") is not None:
        out = replace(out, quantize=kwargs["quantize"])
    if kwargs.get("embed_dim") is not None:
        out = replace(out, embed_dim=kwargs["embed_dim"])
    return out
