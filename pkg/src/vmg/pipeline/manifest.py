"""Run manifest: stage signatures, artifact hashes, cache decisions.

Every stage is identified by a signature hash over (stage name, its
config slice, the content hashes of its inputs). A stage whose recorded
signature matches and whose artifact files still hash to their recorded
values is skipped on rerun; a matching signature with a *changed*
artifact file is corruption and raises instead of silently rebuilding.
The manifest file is rewritten after every stage so a crash leaves the
completed prefix usable.
"""

import hashlib
import os

from ..errors import ConsistencyError, StateError
from ..serialize import canonical_json, file_sha256, read_json, write_json

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"


def stage_signature(name, params, input_hashes):
    payload = canonical_json({"stage": name, "params": params, "inputs": input_hashes})
    return hashlib.sha256(payload.encode()).hexdigest()


class Manifest:
    """Stage records for one run directory.

    The stored config tracks the latest run; caching never consults it.
    A stage is reused iff its signature (config slice + input hashes)
    matches, so editing the config in place reruns exactly the stages
    the edit invalidates.
    """

    def __init__(self, run_dir, config_dict):
        self.run_dir = str(run_dir)
        self.path = os.path.join(self.run_dir, MANIFEST_NAME)
        self.doc = {
            "kind": "vmg-manifest",
            "version": MANIFEST_VERSION,
            "config": config_dict,
            "stages": {},
        }
        if os.path.exists(self.path):
            existing = read_json(self.path)
            if existing.get("kind") != "vmg-manifest":
                raise StateError(f"{self.path} exists but is not a run manifest")
            existing["config"] = config_dict
            self.doc = existing
        self.touched = set()

    def save(self):
        tmp = self.path + ".tmp"
        write_json(tmp, self.doc)
        os.replace(tmp, self.path)

    def _artifact_path(self, rel):
        return os.path.join(self.run_dir, rel)

    def cached_artifacts(self, name, signature):
        """Relpath->hash dict if the stage can be skipped, else None.

        Raises ConsistencyError when the signature matches but an
        artifact file's current content does not.
        """
        stage = self.doc["stages"].get(name)
        if stage is None or stage.get("signature") != signature:
            return None
        if stage.get("status") != "completed":
            return None
        artifacts = stage.get("artifacts", {})
        for rel, recorded in artifacts.items():
            full = self._artifact_path(rel)
            if not os.path.exists(full):
                return None
            actual = file_sha256(full)
            if actual != recorded:
                raise ConsistencyError(
                    f"stage {name}: artifact {rel} hash mismatch "
                    f"(recorded {recorded[:12]}, found {actual[:12]}); "
                    "the file changed outside the pipeline"
                )
        return dict(artifacts)

    def record_completed(self, name, signature, params, input_hashes, artifact_paths, cached):
        artifacts = {}
        for rel in artifact_paths:
            artifacts[rel] = file_sha256(self._artifact_path(rel))
        self.doc["stages"][name] = {
            "signature": signature,
            "params": params,
            "inputs": input_hashes,
            "artifacts": artifacts,
            "status": "completed",
            "cached": bool(cached),
        }
        self.save()
        return artifacts

    def record_failed(self, name, signature, params, input_hashes, error):
        self.doc["stages"][name] = {
            "signature": signature,
            "params": params,
            "inputs": input_hashes,
            "artifacts": {},
            "status": "failed",
            "error": str(error),
        }
        self.save()

    def all_artifact_hashes(self):
        out = {}
        for stage in self.doc["stages"].values():
            out.update(stage.get("artifacts", {}))
        return out

    def prune_untouched(self):
        """Drop records from earlier runs with a different stage plan
        (e.g. a reduced seed count leaves orphan eval:N entries)."""
        stale = set(self.doc["stages"]) - self.touched
        for name in stale:
            del self.doc["stages"][name]
        if stale:
            self.save()


def load_manifest(path):
    doc = read_json(path)
    if doc.get("kind") != "vmg-manifest" or doc.get("version") != MANIFEST_VERSION:
        raise StateError(f"{path}: not a version-{MANIFEST_VERSION} run manifest")
    return doc
