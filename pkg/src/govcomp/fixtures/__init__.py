"""Example programs: the image recognition service under three protocols."""
from importlib import resources

NAMES = ("irs", "irs_rec", "irs_init")


def path(name: str):
    return resources.files(__name__) / f"{name}.gc"


def source(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def load(name: str):
    from ..dsl import parse

    return parse(source(name))
