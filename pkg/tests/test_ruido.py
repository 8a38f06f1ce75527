# tests/test_ruido.py

import numpy as np
import pytest

from app.core.excecoes import ErroConfiguracao, ErroUso
from app.ferramentas.operadores_casca import GeometriaCasca, TipoMedia, media
from app.ferramentas.operadores_esfera import SolenoidalEspectral, obter_grade
from app.ferramentas.ruido import (
    LIMITE_INCREMENTOS,
    EspacoRuido,
    ModeloRuido,
    amostrar_caminho,
    elevar_ruido,
    momentos_escalonados,
    norma_hs,
    verificar_limite_coeficientes,
)


def test_caminho_reprodutivel():
    a = amostrar_caminho(11, 3, 4, 1e-3, 50)
    b = amostrar_caminho(11, 3, 4, 1e-3, 50)
    np.testing.assert_array_equal(a.incrementos, b.incrementos)
    assert a.incrementos.shape == (50, 4)


def test_caminhos_distintos_diferem():
    a = amostrar_caminho(11, 0, 2, 1e-3, 20)
    b = amostrar_caminho(11, 1, 2, 1e-3, 20)
    c = amostrar_caminho(12, 0, 2, 1e-3, 20)
    assert not np.array_equal(a.incrementos, b.incrementos)
    assert not np.array_equal(a.incrementos, c.incrementos)


def test_incremento_independe_de_n_e_do_horizonte():
    """ΔW[k, j] depende só de (semente, caminho, j, k)."""
    longo = amostrar_caminho(5, 2, 3, 1e-2, 40)
    curto = amostrar_caminho(5, 2, 2, 1e-2, 10)
    np.testing.assert_array_equal(longo.incrementos[:10, :2], curto.incrementos)


def test_variancia_dos_incrementos():
    dt = 1e-3
    caminho = amostrar_caminho(0, 0, 2, dt, 100_000)
    variancia = caminho.incrementos.var(axis=0) / dt
    np.testing.assert_allclose(variancia, 1.0, atol=0.02)


def test_caminho_sem_ruido_e_vazio():
    assert amostrar_caminho(0, 0, 0, 1e-3, 10).incrementos.shape == (10, 0)


@pytest.mark.parametrize(
    "argumentos",
    [
        dict(semente=0, id_caminho=0, N=1, dt=0.0, passos=10),
        dict(semente=-1, id_caminho=0, N=1, dt=1e-3, passos=10),
        dict(semente=0, id_caminho=-2, N=1, dt=1e-3, passos=10),
    ],
)
def test_caminho_recusa_parametros_invalidos(argumentos):
    with pytest.raises(ErroConfiguracao):
        amostrar_caminho(**argumentos)


def test_caminho_recusa_tabela_grande_demais():
    with pytest.raises(ErroConfiguracao) as erro:
        amostrar_caminho(0, 0, 2, 1e-6, LIMITE_INCREMENTOS)
    assert erro.value.tipo == "TabelaGrandeDemais"


def test_modelo_padrao(grade):
    modelo = ModeloRuido.padrao(grade, 3, amplitude=0.1)
    assert modelo.N == 3
    assert modelo.matriz().shape == (3, grade.numero_coeficientes)
    assert norma_hs(modelo) == pytest.approx(0.1 * np.sqrt(3), rel=1e-12)


def test_modelo_padrao_excede_truncamento():
    with pytest.raises(ErroConfiguracao):
        ModeloRuido.padrao(obter_grade(1), 4)


def test_modelo_recusa_modo_medio(grade):
    psi = np.zeros(grade.numero_coeficientes)
    psi[0] = 1.0
    with pytest.raises(ErroConfiguracao):
        ModeloRuido(grade, (SolenoidalEspectral(grade, psi),))


def test_modelo_recusa_grade_diferente(grade):
    with pytest.raises(ErroConfiguracao):
        ModeloRuido(grade, (SolenoidalEspectral.modo(obter_grade(3), 1, 0),))


def test_cota_de_hilbert_schmidt(grade):
    modelo = ModeloRuido.de_modos(grade, [(1, 0, 1.0)], modulacao=lambda t: 2.0, limite_m=1.0)
    # ∫ 4 · ‖curl′Y_10‖² dt = 4 · 2 · T
    assert modelo.integral_hs(0.1, 1e-2) == pytest.approx(0.8, rel=1e-12)
    with pytest.raises(ErroConfiguracao):
        modelo.verificar_limite(1.0, 1e-2)


@pytest.mark.parametrize("eps", [0.4, 0.1, 0.05])
def test_elevacao_escala_por_eps(grade, eps):
    geometria = GeometriaCasca(eps, 8, grade)
    modelo = ModeloRuido.padrao(grade, 3)
    ruido = elevar_ruido(modelo, geometria)
    assert norma_hs(ruido, EspacoRuido.H_EPS) ** 2 == pytest.approx(eps * norma_hs(modelo) ** 2, rel=1e-11)
    assert verificar_limite_coeficientes(ruido, 1.0, 1e-2) == pytest.approx(norma_hs(modelo) ** 2, rel=1e-10)


@pytest.mark.parametrize("p", [2.0, 4.0])
def test_momentos_escalonados_constantes_em_eps(grade, p):
    modelo = ModeloRuido.padrao(grade, 2)
    valores = [
        momentos_escalonados(elevar_ruido(modelo, GeometriaCasca(eps, 8, grade)), p, 0.5, 1e-2)
        for eps in (0.4, 0.2, 0.1, 0.05)
    ]
    for valor in valores[1:]:
        np.testing.assert_allclose(valor, valores[0], rtol=1e-9)


def test_momentos_exigem_p_maior_que_dois(grade):
    ruido = elevar_ruido(ModeloRuido.padrao(grade, 1), GeometriaCasca(0.1, 8, grade))
    with pytest.raises(ErroUso):
        momentos_escalonados(ruido, 1.5, 1.0, 1e-2)


def test_elevacao_poluida_preserva_media(grade):
    geometria = GeometriaCasca(0.2, 8, grade)
    modelo = ModeloRuido.padrao(grade, 2)
    poluido = elevar_ruido(modelo, geometria, poluicao=True)
    for g, g_til in zip(modelo.campos, poluido.campos):
        traco = media(TipoMedia.M_ANEL, g_til)
        esperado = g.sintetizar()
        np.testing.assert_allclose(traco.u_lambda, esperado.u_lambda, atol=1e-12)
        np.testing.assert_allclose(traco.u_phi, esperado.u_phi, atol=1e-12)


def test_elevacao_recusa_grade_diferente(grade):
    with pytest.raises(ErroConfiguracao):
        elevar_ruido(ModeloRuido.padrao(obter_grade(3), 1), GeometriaCasca(0.1, 8, grade))


def test_norma_hs_recusa_tipos_trocados(grade):
    modelo = ModeloRuido.padrao(grade, 1)
    with pytest.raises(ErroUso):
        norma_hs(modelo, EspacoRuido.H_EPS)
