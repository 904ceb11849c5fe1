"""Shared fixtures: bundled datasets and small helper algebras."""

import pathlib

import pytest

from wbrst.omega import OmegaAlgebra
from wbrst.parsing import parse_algebra_file, parse_qla_file

DATA = pathlib.Path(__file__).resolve().parent.parent / "src" / "wbrst" / "data"


def read_data(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


def load_qla(name: str):
    return parse_qla_file(read_data(name))


def load_alg(name: str):
    return parse_algebra_file(read_data(name))


QLA_FILES = ("so3.qla", "super_ef.qla", "lyubashenko.qla")
ALG_FILES = ("w3.alg", "w3_printed.alg", "w3_ghosts.alg", "w3_ghosts_free.alg",
             "w32.alg", "w32_ghosts.alg", "w32_ghosts_free.alg")


@pytest.fixture(scope="session")
def qla_datasets():
    return {name: load_qla(name) for name in QLA_FILES}


@pytest.fixture(scope="session")
def omega_algebras(qla_datasets):
    return {name: OmegaAlgebra(d, tw)
            for name, (d, tw) in qla_datasets.items()}
