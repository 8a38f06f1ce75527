# tests/conftest.py
"""Fixtures compartilhadas: grades pequenas, geometrias e geradores semeados."""

import logging

import numpy as np
import pytest

from app.core.base_casca import obter_base
from app.ferramentas.operadores_casca import GeometriaCasca
from app.ferramentas.operadores_esfera import obter_grade

LISTA_EPS = (0.4, 0.2, 0.1, 0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def grade():
    return obter_grade(6)


@pytest.fixture
def grade_pequena():
    return obter_grade(3)


@pytest.fixture(params=LISTA_EPS, ids=lambda eps: f"eps={eps}")
def geometria(request, grade):
    return GeometriaCasca(request.param, 8, grade)


@pytest.fixture
def geometria_fina(grade):
    return GeometriaCasca(0.1, 8, grade)


@pytest.fixture
def base_pequena(grade_pequena):
    return obter_base(GeometriaCasca(0.2, 6, grade_pequena))


@pytest.fixture
def handlers_restaurados():
    """Devolve ao logger raiz os handlers anteriores a configurar_logging."""
    raiz = logging.getLogger()
    handlers, nivel = list(raiz.handlers), raiz.level
    yield
    for handler in raiz.handlers:
        handler.close()
    raiz.handlers[:] = handlers
    raiz.setLevel(nivel)
