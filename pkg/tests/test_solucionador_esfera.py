# tests/test_solucionador_esfera.py

import numpy as np
import pytest

from app.core.excecoes import ErroConfiguracao, ErroUso
from app.core.solucionador_esfera import (
    ConfiguracaoSolucionadorEsfera,
    EsquemaTemporal,
    EstadoEsfera,
    LivroEnergia,
    ModoDinamica,
    diagnostico_equicontinuidade,
    executar,
    passo,
    razao_neutralidade,
    residuo_identidade_energia,
    termo_nao_linear,
    verificar_desigualdade_energia,
)
from app.ferramentas.operadores_esfera import SolenoidalEspectral, coeficientes_aleatorios, obter_grade
from app.ferramentas.ruido import ModeloRuido, amostrar_caminho

LMAX = 6


def _config(**ajustes):
    parametros = dict(nu=0.1, dt=1e-3, t_final=1.0, lmax=LMAX)
    parametros.update(ajustes)
    return ConfiguracaoSolucionadorEsfera(**parametros)


@pytest.mark.parametrize("modo", [ModoDinamica.STOKES, ModoDinamica.NSE])
def test_modo_unico_decai_exatamente_com_fator_integrante(modo):
    grade = obter_grade(LMAX)
    u0 = SolenoidalEspectral.modo(grade, 2, 1)
    config = _config(modo=modo, passos_por_amostra=100)
    trajetoria = executar(config, u0)
    esperado = np.exp(-0.1 * 6 * 1.0)
    np.testing.assert_allclose(trajetoria.final.psi, esperado * u0.psi, atol=1e-12)
    assert len(trajetoria.tempos) == 11
    assert trajetoria.tempos[-1] == pytest.approx(1.0)


def test_imex_euler_aproxima_o_decaimento():
    grade = obter_grade(LMAX)
    u0 = SolenoidalEspectral.modo(grade, 2, 0)
    trajetoria = executar(_config(modo=ModoDinamica.STOKES, esquema=EsquemaTemporal.IMEX_EULER), u0)
    coeficiente = trajetoria.final.psi[np.flatnonzero(u0.psi)[0]]
    assert coeficiente == pytest.approx(np.exp(-0.6), rel=1e-3)


def test_termo_nao_linear_e_neutro(rng):
    grade = obter_grade(LMAX)
    u = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    assert razao_neutralidade(u, 0.1) <= 1e-10
    assert termo_nao_linear(u).psi[0] == 0.0


def test_termo_nao_linear_de_modo_unico_se_anula():
    u = SolenoidalEspectral.modo(obter_grade(LMAX), 3, -2)
    np.testing.assert_allclose(termo_nao_linear(u).psi, 0.0, atol=1e-12)


def test_stokes_forcado_atinge_estado_estacionario():
    grade = obter_grade(4)
    forca = SolenoidalEspectral.modo(grade, 1, 0, 0.5)
    config = ConfiguracaoSolucionadorEsfera(
        nu=1.0, dt=1e-3, t_final=10.0, lmax=4, forcamento=forca, modo=ModoDinamica.STOKES, passos_por_amostra=1000
    )
    trajetoria = executar(config, SolenoidalEspectral.zero(grade))
    np.testing.assert_allclose(trajetoria.final.psi, forca.psi / 2.0, rtol=2e-3, atol=1e-12)
    assert not trajetoria.deterministica


def test_forcamento_dependente_do_tempo():
    grade = obter_grade(4)
    forca = SolenoidalEspectral.modo(grade, 2, 2)
    config = ConfiguracaoSolucionadorEsfera(
        nu=0.5, dt=1e-2, t_final=0.5, lmax=4, forcamento=lambda t: forca if t >= 0.25 else None
    )
    trajetoria = executar(config, SolenoidalEspectral.zero(grade))
    assert trajetoria.energias()[len(trajetoria.tempos) // 2 - 1] == 0.0
    assert trajetoria.energias()[-1] > 0.0


def test_identidade_de_energia_deterministica(rng):
    grade = obter_grade(LMAX)
    u0 = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    trajetoria = executar(_config(t_final=0.2), u0)
    assert trajetoria.deterministica
    assert trajetoria.identidade_ok
    assert residuo_identidade_energia(trajetoria) == pytest.approx(trajetoria.residuo_energia)
    assert trajetoria.energias()[-1] < trajetoria.energias()[0]


def test_desigualdade_de_energia_deterministica(rng):
    grade = obter_grade(LMAX)
    u0 = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    resultado = verificar_desigualdade_energia(executar(_config(t_final=0.2), u0))
    assert resultado["ok"]
    assert resultado["k_empirico"] == 0.0


def test_execucao_estocastica_reprodutivel(rng):
    grade = obter_grade(LMAX)
    ruido = ModeloRuido.padrao(grade, 3)
    config = _config(t_final=0.1, ruido=ruido)
    u0 = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    caminho = amostrar_caminho(3, 0, 3, config.dt, config.numero_passos)
    a = executar(config, u0, caminho)
    b = executar(config, u0, caminho)
    np.testing.assert_array_equal(a.final.psi, b.final.psi)
    assert not a.deterministica
    assert a.livro_final.variacao_quadratica == pytest.approx(0.1 * 3 * 0.01, rel=1e-9)
    resultado = verificar_desigualdade_energia(a)
    assert resultado["ok"] and np.isfinite(resultado["k_empirico"])


def test_equicontinuidade_finita(rng):
    grade = obter_grade(LMAX)
    u0 = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    trajetoria = executar(_config(t_final=0.1, passos_por_amostra=10), u0)
    valor = diagnostico_equicontinuidade(trajetoria)
    assert np.isfinite(valor) and valor > 0.0


def test_horizonte_nulo_devolve_dado_inicial(rng):
    grade = obter_grade(LMAX)
    u0 = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    trajetoria = executar(_config(t_final=0.0), u0)
    assert trajetoria.tempos == [0.0]
    np.testing.assert_array_equal(trajetoria.final.psi, u0.psi)
    assert diagnostico_equicontinuidade(trajetoria) == 0.0


def test_modo_medio_do_dado_inicial_e_descartado():
    grade = obter_grade(LMAX)
    psi = np.zeros(grade.numero_coeficientes)
    psi[0] = 3.0
    trajetoria = executar(_config(t_final=0.0), SolenoidalEspectral(grade, psi))
    assert trajetoria.final.psi[0] == 0.0


def test_linhas_de_exportacao():
    grade = obter_grade(LMAX)
    trajetoria = executar(_config(t_final=0.01), SolenoidalEspectral.modo(grade, 1, 0))
    linhas = trajetoria.para_linhas()
    assert len(linhas) == 11
    assert set(linhas[0]) == {
        "t",
        "norma_l2",
        "norma_rot",
        "dissipacao",
        "trabalho_forcamento",
        "variacao_quadratica",
        "martingal",
    }
    assert linhas[0]["norma_l2"] == pytest.approx(np.sqrt(2.0))


@pytest.mark.parametrize(
    "ajustes",
    [
        dict(nu=0.0),
        dict(dt=-1e-3),
        dict(t_final=-1.0),
        dict(lmax=0),
        dict(lmax=16, modo=ModoDinamica.NSE),
        dict(passos_por_amostra=0),
        dict(esquema="RK4"),
    ],
)
def test_configuracao_invalida(ajustes):
    with pytest.raises((ErroConfiguracao, ValueError)):
        _config(**ajustes)


def test_stokes_aceita_truncamento_alto():
    assert _config(lmax=20, modo=ModoDinamica.STOKES).lmax == 20


def test_ruido_com_grade_diferente_e_recusado():
    with pytest.raises(ErroConfiguracao):
        _config(ruido=ModeloRuido.padrao(obter_grade(4), 2))


def test_dado_inicial_com_grade_diferente_e_recusado():
    with pytest.raises(ErroConfiguracao):
        executar(_config(), SolenoidalEspectral.modo(obter_grade(4), 1, 0))


def test_execucao_estocastica_exige_caminho():
    grade = obter_grade(LMAX)
    config = _config(ruido=ModeloRuido.padrao(grade, 2), t_final=0.01)
    u0 = SolenoidalEspectral.modo(grade, 1, 0)
    with pytest.raises(ErroUso):
        executar(config, u0)
    with pytest.raises(ErroUso):
        executar(config, u0, amostrar_caminho(0, 0, 3, config.dt, config.numero_passos))
    with pytest.raises(ErroUso):
        executar(config, u0, amostrar_caminho(0, 0, 2, 2 * config.dt, config.numero_passos))
    with pytest.raises(ErroUso):
        executar(config, u0, amostrar_caminho(0, 0, 2, config.dt, config.numero_passos - 1))


def test_execucao_deterministica_recusa_caminho():
    grade = obter_grade(LMAX)
    config = _config(t_final=0.01)
    with pytest.raises(ErroUso):
        executar(config, SolenoidalEspectral.modo(grade, 1, 0), amostrar_caminho(0, 0, 1, config.dt, 10))


def test_passo_valida_incremento():
    grade = obter_grade(LMAX)
    estado = EstadoEsfera(0.0, SolenoidalEspectral.modo(grade, 1, 0))
    with pytest.raises(ErroUso):
        passo(estado, _config(), np.array([0.1]))
    config = _config(ruido=ModeloRuido.padrao(grade, 2))
    with pytest.raises(ErroUso):
        passo(estado, config)
    with pytest.raises(ErroUso):
        passo(estado, config, np.zeros(3))
    assert passo(estado, config, np.zeros(2)).passo == 1


def test_livro_de_energia_acumula():
    livro = LivroEnergia().acumular(dissipacao=0.5, martingal=0.1).acumular(dissipacao=0.25)
    assert livro.dissipacao == 0.75
    assert livro.balanco(2.0) == pytest.approx(2.0 - 0.75 + 0.1)
    assert livro.para_dict()["martingal"] == 0.1
