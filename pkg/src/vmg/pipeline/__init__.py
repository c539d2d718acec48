from .config import (
    CHECKPOINT_MODES,
    PROFILES,
    SCHEMA_VERSION,
    PipelineConfig,
    parse_config,
)
from .manifest import MANIFEST_NAME, Manifest, load_manifest, stage_signature
from .run import replay_manifest, run_pipeline

__all__ = [
    "CHECKPOINT_MODES",
    "PROFILES",
    "SCHEMA_VERSION",
    "PipelineConfig",
    "parse_config",
    "MANIFEST_NAME",
    "Manifest",
    "load_manifest",
    "stage_signature",
    "replay_manifest",
    "run_pipeline",
]
