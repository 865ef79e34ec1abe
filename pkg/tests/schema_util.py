import json
from importlib import resources

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

_DIR = resources.files("qdiscord") / "schemas"


def _load(name):
    return json.loads((_DIR / f"{name}.json").read_text())


_REGISTRY = Registry().with_resource("matrix.json", Resource.from_contents(_load("matrix")))


def validate(obj, name):
    Draft202012Validator(_load(name), registry=_REGISTRY).validate(obj)
