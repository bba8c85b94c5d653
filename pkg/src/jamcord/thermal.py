"""Static fire-exposure screening of a gripper bill of materials.

A component fails when the environment temperature exceeds its material's
maximum service temperature, unless it is thermally isolated from the
heat source (the separated equalizer with its water-cooling cavity is
collapsed into that one flag).  No heat transfer is modeled; this is a
threshold screen for material selection.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from .errors import InputError

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

ROLE_TAGS = ("structure", "bead", "wire", "seal", "membrane")


@dataclass(frozen=True)
class MaterialSpec:
    name: str
    max_service_temp: float  # deg C
    roles: tuple[str, ...] = ()
    source: str = ""  # where the service temperature was taken from

    def __post_init__(self):
        if not math.isfinite(self.max_service_temp):
            raise InputError(f"max_service_temp must be finite for {self.name!r}")
        for r in self.roles:
            if r not in ROLE_TAGS:
                raise InputError(f"unknown role tag {r!r} for {self.name!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "max_service_temp": self.max_service_temp,
                "roles": list(self.roles), "source": self.source}


@dataclass(frozen=True)
class BomComponent:
    name: str
    material: MaterialSpec
    thermally_isolated: bool = False


@dataclass(frozen=True)
class BillOfMaterials:
    components: tuple[BomComponent, ...]

    def __post_init__(self):
        if not self.components:
            raise InputError("bill of materials must not be empty")


@dataclass(frozen=True)
class FireFinding:
    component: str
    material: str
    max_service_temp: float
    margin_deficit: float  # environment minus service limit, deg C


def check_fire_exposure(bom: BillOfMaterials, environment_temp: float) -> list[FireFinding]:
    """Components that would fail at the given temperature, worst first.

    A component fails iff it is not thermally isolated and the
    environment exceeds its material's service limit.
    """
    if not math.isfinite(environment_temp):
        raise InputError("environment temperature must be finite")
    findings = []
    for comp in bom.components:
        if comp.thermally_isolated:
            continue
        deficit = environment_temp - comp.material.max_service_temp
        if deficit > 0:
            findings.append(FireFinding(
                component=comp.name,
                material=comp.material.name,
                max_service_temp=comp.material.max_service_temp,
                margin_deficit=deficit,
            ))
    findings.sort(key=lambda f: (-f.margin_deficit, f.component))
    return findings


# -------------------------
# Catalog and BOM files
# -------------------------

def load_catalog(path=None) -> dict[str, MaterialSpec]:
    path = path or os.path.join(DATA_DIR, "material_catalog.json")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read material catalog {path}: {exc}") from exc
    catalog: dict[str, MaterialSpec] = {}
    for entry in data.get("materials", []):
        known = {"name", "max_service_temp", "roles", "source"}
        unknown = set(entry) - known
        if unknown:
            raise InputError(f"unknown material fields: {sorted(unknown)}")
        spec = MaterialSpec(
            name=entry["name"],
            max_service_temp=float(entry["max_service_temp"]),
            roles=tuple(entry.get("roles", ())),
            source=entry.get("source", ""),
        )
        if spec.name in catalog:
            raise InputError(f"duplicate material name {spec.name!r}")
        catalog[spec.name] = spec
    return catalog


def load_bom(path, catalog: dict[str, MaterialSpec] | None = None) -> BillOfMaterials:
    catalog = catalog if catalog is not None else load_catalog()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read BOM {path}: {exc}") from exc
    comps = []
    for entry in data.get("components", []):
        known = {"name", "material", "thermally_isolated"}
        unknown = set(entry) - known
        if unknown:
            raise InputError(f"unknown BOM fields: {sorted(unknown)}")
        mat = entry["material"]
        if mat not in catalog:
            raise InputError(f"material {mat!r} not in catalog")
        comps.append(BomComponent(
            name=entry["name"],
            material=catalog[mat],
            thermally_isolated=bool(entry.get("thermally_isolated", False)),
        ))
    return BillOfMaterials(components=tuple(comps))


def bundled_bom_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)
