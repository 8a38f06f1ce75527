# tests/test_solucionador_casca.py

import numpy as np
import pytest

from app.core.base_casca import obter_base
from app.core.excecoes import ErroConfiguracao, ErroConsistencia, ErroUso
from app.core.solucionador_casca import (
    ConfiguracaoSolucionadorCasca,
    EstadoCasca,
    FormaNaoLinear,
    aplicar_stokes_eps,
    dados_iniciais_casca,
    executar_casca,
    passo_casca,
    residuo_identidade_modificada,
    residuos_contorno,
    termo_nao_linear_casca,
)
from app.core.solucionador_esfera import ModoDinamica
from app.ferramentas.operadores_casca import (
    CampoVetorialCasca,
    GeometriaCasca,
    TipoProdutoCasca,
    TipoRetracao,
    campo_de_potenciais,
    norma_casca,
    produto_interno_casca,
    retrair,
)
from app.ferramentas.operadores_esfera import SolenoidalEspectral, coeficientes_aleatorios, obter_grade
from app.ferramentas.ruido import ModeloRuido, amostrar_caminho, elevar_ruido


@pytest.fixture
def geometria_solver(grade_pequena):
    return GeometriaCasca(0.2, 6, grade_pequena)


def _config(geometria, **ajustes):
    parametros = dict(geometria=geometria, nu=0.1, dt=1e-3, t_final=0.1)
    parametros.update(ajustes)
    return ConfiguracaoSolucionadorCasca(**parametros)


@pytest.mark.parametrize("setor", ["toroidal", "poloidal"])
def test_autofuncao_decai_exponencialmente(geometria_solver, setor):
    base = obter_base(geometria_solver)
    u0 = base.modo(2, 1, 0, setor)
    trajetoria = executar_casca(_config(geometria_solver, passos_por_amostra=100), u0)
    lam_T, lam_P = base.autovalores_grau(2)
    lam = lam_T[0] if setor == "toroidal" else lam_P[0]
    esperado = np.exp(-0.1 * lam * 0.1)
    assert np.sqrt(trajetoria.energias()[-1]) == pytest.approx(esperado, rel=1e-10)
    assert len(trajetoria.tempos) == 2
    assert trajetoria.identidade_ok


def test_campo_permanece_em_h_eps(geometria_solver, rng):
    base = obter_base(geometria_solver)
    trajetoria = executar_casca(_config(geometria_solver, t_final=0.02), base.coeficientes_aleatorios(rng))
    residuos = residuos_contorno(trajetoria.campo(-1))
    assert residuos["normal"] < 1e-8
    assert residuos["tangencial"] < 1e-6


def test_forma_rotacional_e_neutra(rng):
    base = obter_base(GeometriaCasca(0.1, 6, obter_grade(4)))
    u = base.coeficientes_aleatorios(rng)
    B_T, B_P = termo_nao_linear_casca(base, u)
    contribuicao = abs(float(np.sum(B_T * u[0]) + np.sum(B_P * u[1])))
    assert contribuicao <= 1e-10 * np.sqrt(base.energia(B_T, B_P) * base.energia(*u))


def test_forma_advectiva_e_antissimetrica(rng):
    base = obter_base(GeometriaCasca(0.1, 6, obter_grade(4)))
    u = base.coeficientes_aleatorios(rng)
    v = base.coeficientes_aleatorios(rng)
    B_T, B_P = termo_nao_linear_casca(base, u, v, forma=FormaNaoLinear.ADVECTIVA)
    contribuicao = abs(float(np.sum(B_T * v[0]) + np.sum(B_P * v[1])))
    assert contribuicao <= 1e-8 * np.sqrt(base.energia(B_T, B_P) * base.energia(*v))


def test_forma_rotacional_recusa_segundo_argumento(base_pequena, rng):
    u = base_pequena.coeficientes_aleatorios(rng)
    with pytest.raises(ErroUso):
        termo_nao_linear_casca(base_pequena, u, u, forma=FormaNaoLinear.ROTACIONAL)


def test_termo_nao_linear_de_campo_nulo(base_pequena):
    B_T, B_P = termo_nao_linear_casca(base_pequena, base_pequena.zeros())
    assert not np.any(B_T) and not np.any(B_P)


def test_execucao_nse_conserva_identidade(geometria_solver, rng):
    base = obter_base(geometria_solver)
    c_T, c_P = base.coeficientes_aleatorios(rng)
    trajetoria = executar_casca(
        _config(geometria_solver, t_final=0.01, modo=ModoDinamica.NSE), (0.1 * c_T, 0.1 * c_P)
    )
    assert trajetoria.identidade_ok
    assert trajetoria.energias()[-1] < trajetoria.energias()[0]


def test_stokes_eps_aceita_campo_retraido(geometria_solver, rng):
    grade = geometria_solver.grade
    u = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    campo = retrair(TipoRetracao.R_ANEL, u, geometria_solver)
    resultado = aplicar_stokes_eps(campo)
    assert resultado.geometria == geometria_solver


def test_stokes_eps_recusa_campo_fora_do_dominio(geometria_solver, rng):
    grade = geometria_solver.grade
    r = geometria_solver.nos_radiais[:, None]
    # S = (r − 1)·ψ tem S′ ≠ 0 nas paredes
    toroidal = (r - 1.0) * coeficientes_aleatorios(grade, rng, lmin=1)[None, :]
    with pytest.raises(ErroConsistencia) as erro:
        aplicar_stokes_eps(campo_de_potenciais(geometria_solver, toroidal))
    assert erro.value.tipo == "ContornoViolado"


@pytest.mark.parametrize("eps", [0.4, 0.1])
@pytest.mark.parametrize("nr", [6, 8, 12])
def test_campo_da_base_pertence_ao_dominio_de_stokes(eps, nr, rng):
    base = obter_base(GeometriaCasca(eps, nr, obter_grade(4)))
    campo = base.sintetizar(*base.coeficientes_aleatorios(rng))
    residuos = residuos_contorno(campo)
    assert residuos["normal"] < 1e-10
    assert residuos["tangencial"] < 1e-10
    assert aplicar_stokes_eps(campo).geometria == campo.geometria


def test_perfil_cubico_com_derivada_nula_nas_paredes(geometria_solver, rng):
    x = geometria_solver.nos_radiais[:, None] - 1.0
    # S′ = (r − 1)(r − 1 − ε) se anula nas duas paredes
    perfil = x**3 / 3.0 - geometria_solver.eps * x**2 / 2.0
    toroidal = perfil * coeficientes_aleatorios(geometria_solver.grade, rng, lmin=1)[None, :]
    campo = campo_de_potenciais(geometria_solver, toroidal)
    assert residuos_contorno(campo)["tangencial"] < 1e-10
    aplicar_stokes_eps(campo)


def test_stokes_eps_simetrico_em_campos_da_base(rng):
    base = obter_base(GeometriaCasca(0.1, 6, obter_grade(4)))
    fina = GeometriaCasca(0.1, 16, base.grade)

    def campo_refinado():
        potenciais = base.avaliar_potenciais(*base.coeficientes_aleatorios(rng), fina.nos_radiais)
        return campo_de_potenciais(fina, potenciais["S"], potenciais["Q"])

    u, v = campo_refinado(), campo_refinado()
    A_u, A_v = aplicar_stokes_eps(u), aplicar_stokes_eps(v)
    seminorma = TipoProdutoCasca.SEMINORMA_V_EPS
    escala = norma_casca(u, seminorma) * norma_casca(v, seminorma)
    assert abs(produto_interno_casca(A_u, v) - produto_interno_casca(u, A_v)) <= 1e-8 * escala
    assert abs(produto_interno_casca(u, A_v) - produto_interno_casca(u, v, seminorma)) <= 1e-8 * escala


def test_dados_iniciais_poluidos_preservam_traco(geometria_solver, rng):
    base = obter_base(geometria_solver)
    grade = geometria_solver.grade
    u0 = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    limpo = dados_iniciais_casca(base, u0)
    poluido = dados_iniciais_casca(base, u0, poluicao=1.0)
    np.testing.assert_allclose(base.traco(poluido[0]).psi, u0.psi, atol=1e-12)
    assert not np.allclose(limpo[0], poluido[0])
    assert not np.any(poluido[1])


def test_trajetoria_registra_traco_e_flutuacao(geometria_solver, rng):
    base = obter_base(geometria_solver)
    grade = geometria_solver.grade
    u0 = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    trajetoria = executar_casca(_config(geometria_solver, t_final=0.01), dados_iniciais_casca(base, u0))
    np.testing.assert_allclose(trajetoria.alphas[0].psi, u0.psi, atol=1e-12)
    assert trajetoria.energia_flutuacao[0] == pytest.approx(0.0, abs=1e-20)
    total = np.array(trajetoria.energia_media) + np.array(trajetoria.energia_flutuacao)
    np.testing.assert_allclose(total, trajetoria.energias(), rtol=1e-10)
    linhas = trajetoria.para_linhas()
    assert len(linhas) == len(trajetoria.tempos)
    assert {"norma_alpha", "norma_beta", "norma_rot_beta"} <= set(linhas[0])


def test_identidade_modificada_tem_residuo_pequeno(geometria_solver, rng):
    base = obter_base(geometria_solver)
    grade = geometria_solver.grade
    u0 = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    phi = SolenoidalEspectral.modo(grade, 1, 0)
    residuos = []
    for dt in (2e-4, 1e-4):
        config = _config(geometria_solver, dt=dt, t_final=0.01)
        trajetoria = executar_casca(config, dados_iniciais_casca(base, u0, poluicao=1.0))
        residuos.append(residuo_identidade_modificada(trajetoria, config, phi))
    assert residuos[1] <= residuos[0]
    assert residuos[1] < 1e-2


def test_identidade_modificada_estocastica(geometria_solver, rng):
    base = obter_base(geometria_solver)
    grade = geometria_solver.grade
    ruido = elevar_ruido(ModeloRuido.padrao(grade, 2), geometria_solver)
    config = _config(geometria_solver, dt=1e-3, t_final=0.02, ruido=ruido)
    caminho = amostrar_caminho(1, 0, 2, config.dt, config.numero_passos)
    u0 = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    trajetoria = executar_casca(config, dados_iniciais_casca(base, u0), caminho)
    assert np.isfinite(residuo_identidade_modificada(trajetoria, config, SolenoidalEspectral.modo(grade, 2, 0), caminho))


def test_identidade_modificada_exige_stokes_e_todos_os_passos(geometria_solver, rng):
    base = obter_base(geometria_solver)
    phi = SolenoidalEspectral.modo(geometria_solver.grade, 1, 0)
    config = _config(geometria_solver, t_final=0.01, passos_por_amostra=5)
    trajetoria = executar_casca(config, base.coeficientes_aleatorios(rng))
    with pytest.raises(ErroUso):
        residuo_identidade_modificada(trajetoria, config, phi)
    config_nse = _config(geometria_solver, t_final=0.01, modo=ModoDinamica.NSE)
    with pytest.raises(ErroUso):
        residuo_identidade_modificada(trajetoria, config_nse, phi)


def test_ruido_em_outra_geometria_e_recusado(geometria_solver, grade_pequena):
    outra = GeometriaCasca(0.1, 6, grade_pequena)
    ruido = elevar_ruido(ModeloRuido.padrao(grade_pequena, 1), outra)
    with pytest.raises(ErroConsistencia):
        _config(geometria_solver, ruido=ruido)
    with pytest.raises(ErroConsistencia):
        _config(geometria_solver, forcamento=CampoVetorialCasca.zero(outra))


@pytest.mark.parametrize(
    "ajustes",
    [dict(nu=-1.0), dict(dt=0.0), dict(t_final=-0.5), dict(passos_por_amostra=0)],
)
def test_configuracao_invalida(geometria_solver, ajustes):
    with pytest.raises(ErroConfiguracao):
        _config(geometria_solver, **ajustes)


def test_execucao_estocastica_exige_caminho(geometria_solver, rng):
    ruido = elevar_ruido(ModeloRuido.padrao(geometria_solver.grade, 2), geometria_solver)
    config = _config(geometria_solver, t_final=0.01, ruido=ruido)
    u0 = obter_base(geometria_solver).zeros()
    with pytest.raises(ErroUso):
        executar_casca(config, u0)
    with pytest.raises(ErroUso):
        executar_casca(config, u0, amostrar_caminho(0, 0, 1, config.dt, config.numero_passos))


def test_coeficientes_com_forma_errada_sao_recusados(geometria_solver):
    with pytest.raises(ErroConfiguracao):
        executar_casca(_config(geometria_solver), (np.zeros((16, 3)), np.zeros((16, 2))))


def test_passo_com_incremento_sem_ruido(geometria_solver):
    c_T, c_P = obter_base(geometria_solver).zeros()
    with pytest.raises(ErroUso):
        passo_casca(EstadoCasca(0.0, c_T, c_P), _config(geometria_solver), np.array([0.5]))


def test_forcamento_constante_alimenta_o_livro(geometria_solver, rng):
    grade = geometria_solver.grade
    forca = retrair(TipoRetracao.R_ANEL, SolenoidalEspectral.modo(grade, 1, 0), geometria_solver)
    config = _config(geometria_solver, t_final=0.01, forcamento=forca)
    trajetoria = executar_casca(config, obter_base(geometria_solver).zeros())
    assert trajetoria.livros[-1].trabalho_forcamento > 0.0
    assert trajetoria.livros[-1].forcamento_vlinha > 0.0
