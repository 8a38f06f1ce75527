# tests/test_base_casca.py

import numpy as np
import pytest

from app.core.base_casca import BaseCasca, obter_base
from app.core.excecoes import ErroConfiguracao
from app.ferramentas.operadores_casca import (
    CampoVetorialCasca,
    GeometriaCasca,
    TipoMedia,
    media,
    norma_casca,
    verificar_h_eps,
)
from app.ferramentas.operadores_esfera import SolenoidalEspectral, coeficientes_aleatorios, obter_grade


def test_base_exige_cinco_nos(grade_pequena):
    with pytest.raises(ErroConfiguracao) as erro:
        BaseCasca(GeometriaCasca(0.2, 4, grade_pequena))
    assert erro.value.tipo == "NosRadiaisInsuficientes"


def test_obter_base_reutiliza_instancia(grade_pequena):
    geometria = GeometriaCasca(0.2, 6, grade_pequena)
    assert obter_base(geometria) is obter_base(geometria)


def test_formas_dos_coeficientes(base_pequena):
    c_T, c_P = base_pequena.zeros()
    assert c_T.shape == (16, 4)
    assert c_P.shape == (16, 2)


def test_perfis_satisfazem_contorno(base_pequena):
    assert base_pequena.residuo_contorno() < 1e-8


@pytest.mark.parametrize("eps", [0.4, 0.1])
def test_autovalores_positivos_e_crescentes(grade_pequena, eps):
    base = obter_base(GeometriaCasca(eps, 6, grade_pequena))
    for l in range(1, grade_pequena.lmax + 1):
        lam_T, lam_P = base.autovalores_grau(l)
        assert np.all(lam_T > 0) and np.all(lam_P > 0)
        assert np.all(np.diff(lam_T) >= 0)


def test_linha_do_modo_medio_e_nula(base_pequena):
    lam_T, lam_P = base_pequena.autovalores
    np.testing.assert_array_equal(lam_T[0], 0.0)
    np.testing.assert_array_equal(lam_P[0], 0.0)


def test_campos_da_base_estao_em_h_eps(base_pequena, rng):
    u = base_pequena.sintetizar(*base_pequena.coeficientes_aleatorios(rng))
    assert verificar_h_eps(u, tolerancia=1e-7)


def test_projecao_toroidal_recupera_coeficientes(base_pequena, rng):
    c_T, c_P = base_pequena.coeficientes_aleatorios(rng)
    c_P = np.zeros_like(c_P)
    rec_T, rec_P = base_pequena.projetar(base_pequena.sintetizar(c_T, c_P))
    np.testing.assert_allclose(rec_T, c_T, atol=1e-11)
    np.testing.assert_allclose(rec_P, 0.0, atol=1e-11)


def test_potenciais_ida_e_volta(base_pequena, rng):
    c_T, c_P = base_pequena.coeficientes_aleatorios(rng)
    rec_T, rec_P = base_pequena.coeficientes_de_potenciais(*base_pequena.potenciais(c_T, c_P))
    np.testing.assert_allclose(rec_T, c_T, atol=1e-11)
    np.testing.assert_allclose(rec_P, c_P, atol=1e-9)


def test_energia_toroidal_coincide_com_norma_da_casca(base_pequena, rng):
    c_T, c_P = base_pequena.coeficientes_aleatorios(rng)
    c_P = np.zeros_like(c_P)
    u = base_pequena.sintetizar(c_T, c_P)
    assert BaseCasca.energia(c_T, c_P) == pytest.approx(norma_casca(u) ** 2, rel=1e-11)


def test_energia_rotacional_domina_primeiro_autovalor(base_pequena, rng):
    c_T, c_P = base_pequena.coeficientes_aleatorios(rng)
    lam_T, lam_P = base_pequena.autovalores
    lam_min = min(lam_T[1:].min(), lam_P[1:].min())
    assert base_pequena.energia_rotacional(c_T, c_P) >= lam_min * BaseCasca.energia(c_T, c_P) * (1 - 1e-12)


def test_traco_da_retracao_e_identidade(base_pequena, rng):
    grade = base_pequena.grade
    u = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    np.testing.assert_allclose(base_pequena.traco(base_pequena.retrair_coeficientes(u)).psi, u.psi, atol=1e-12)


def test_traco_coincide_com_media_anel(base_pequena, rng):
    c_T, c_P = base_pequena.coeficientes_aleatorios(rng)
    alpha = base_pequena.traco(c_T).sintetizar()
    anel = media(TipoMedia.M_ANEL, base_pequena.sintetizar(c_T, c_P))
    np.testing.assert_allclose(anel.u_lambda, alpha.u_lambda, atol=1e-11)
    np.testing.assert_allclose(anel.u_phi, alpha.u_phi, atol=1e-11)


def test_partes_de_campo_retraido(base_pequena, rng):
    grade = base_pequena.grade
    u = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    c_T = base_pequena.retrair_coeficientes(u)
    (media_T, media_P), (flut_T, flut_P) = base_pequena.partes(c_T, np.zeros((grade.numero_coeficientes, 2)))
    np.testing.assert_allclose(media_T, c_T, atol=1e-12)
    np.testing.assert_allclose(flut_T, 0.0, atol=1e-12)
    np.testing.assert_array_equal(flut_P, 0.0)


def test_partes_sao_ortogonais(base_pequena, rng):
    c_T, c_P = base_pequena.coeficientes_aleatorios(rng)
    (media_T, _), (flut_T, _) = base_pequena.partes(c_T, c_P)
    assert abs(float(np.sum(media_T * flut_T))) <= 1e-11 * BaseCasca.energia(c_T, c_P)


def test_poluicao_tem_traco_nulo(base_pequena, rng):
    grade = base_pequena.grade
    g = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    np.testing.assert_allclose(base_pequena.traco(base_pequena.coeficientes_poluicao(g)).psi, 0.0, atol=1e-12)


def test_retracao_recusa_outra_grade(base_pequena):
    with pytest.raises(ErroConfiguracao):
        base_pequena.retrair_coeficientes(SolenoidalEspectral.modo(obter_grade(4), 1, 0))


def test_projetar_recusa_outra_geometria(base_pequena, grade_pequena):
    with pytest.raises(ErroConfiguracao):
        base_pequena.projetar(CampoVetorialCasca.zero(GeometriaCasca(0.1, 6, grade_pequena)))
