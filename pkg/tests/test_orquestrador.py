# tests/test_orquestrador.py

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core import orquestrador
from app.core.excecoes import ErroConfiguracao, ErroDivergencia, ErroUso
from app.core.orquestrador import (
    ConfiguracaoEstudo,
    ajustar_taxa,
    campo_de_modos,
    carregar_configuracao_estudo,
    executar_estudo_convergencia,
    executar_referencia_esfera,
)
from app.core.solucionador_esfera import ModoDinamica
from app.ferramentas.operadores_esfera import indice_modo, obter_grade

EPS = [0.4, 0.2, 0.1, 0.05]


def _estudo(**ajustes) -> ConfiguracaoEstudo:
    dados = {"eps_list": EPS, "lmax": 4, "nr": 6, "dt": 1e-3, "t_final": 0.02, "passos_por_amostra": 5}
    dados.update(ajustes)
    return carregar_configuracao_estudo(dados)


# --- ajuste de taxa ---


def test_taxa_de_lei_de_potencia_exata():
    ajuste = ajustar_taxa(EPS, [3.0 * e**2 for e in EPS])
    assert ajuste.taxa == pytest.approx(2.0, abs=1e-12)
    assert ajuste.residuo == pytest.approx(0.0, abs=1e-12)
    assert ajuste.convergente and ajuste.aviso is None
    assert ajuste.pontos == 4


def test_erros_constantes_nao_convergem():
    ajuste = ajustar_taxa(EPS, [0.3] * 4)
    assert ajuste.taxa == pytest.approx(0.0, abs=1e-12)
    assert not ajuste.convergente
    assert "taxa" in ajuste.aviso


@pytest.mark.parametrize("erros", [[0.1, 0.0, 0.01, 0.001], [0.1, -1.0, 0.01, 0.001], [0.1, np.nan, 0.01, 0.001]])
def test_erros_nao_positivos_pulam_o_ajuste(erros):
    ajuste = ajustar_taxa(EPS, erros)
    assert ajuste.taxa is None
    assert not ajuste.convergente
    assert ajuste.aviso


def test_ajuste_exige_tres_pontos():
    with pytest.raises(ErroUso):
        ajustar_taxa([0.2, 0.1], [0.2, 0.1])
    with pytest.raises(ErroUso):
        ajustar_taxa([0.4, 0.2, 0.1], [0.2, 0.1])


@settings(max_examples=50, deadline=None)
@given(
    taxa=st.floats(min_value=0.1, max_value=3.0),
    constante=st.floats(min_value=1e-3, max_value=10.0),
)
def test_ajuste_recupera_qualquer_lei_de_potencia(taxa, constante):
    ajuste = ajustar_taxa(EPS, [constante * e**taxa for e in EPS])
    assert ajuste.taxa == pytest.approx(taxa, abs=1e-8)
    assert ajuste.convergente


# --- configuração ---


def test_configuracao_aceita_chaves_externas():
    config = carregar_configuracao_estudo(
        {"eps_list": [0.3, 0.1, 0.05], "mode": "NSE", "stochastic": True, "paths": 4, "seed": 9, "moment_p": 3}
    )
    assert config.lista_eps == [0.3, 0.1, 0.05]
    assert config.modo is ModoDinamica.NSE
    assert config.estocastico and config.caminhos == 4 and config.semente == 9
    assert config.momento_p == 3.0


def test_dict_externo_omite_saida():
    externo = _estudo(out="outra_pasta").para_dict_externo()
    assert "out" not in externo
    assert externo["eps_list"] == EPS
    assert externo["mode"] == "STOKES"


@pytest.mark.parametrize(
    "dados",
    [
        {"eps_list": []},
        {"eps_list": [0.1, 0.2, 0.05]},
        {"eps_list": [0.6, 0.3, 0.1]},
        {"eps_list": [0.4, 0.2, 0.0]},
        {"nu": 0.0},
        {"nr": 4},
        {"paths": 0},
        {"moment_p": 1.0},
        {"mode": "NSE", "lmax": 20},
        {"lmax": 2, "modos_iniciais": [[3, 0, 1.0]]},
        {"campo_desconhecido": 1},
    ],
)
def test_configuracao_invalida(dados):
    with pytest.raises(ErroConfiguracao):
        carregar_configuracao_estudo(dados)


def test_modos_de_ruido_definem_n():
    config = carregar_configuracao_estudo({"ruido": {"modes": [[1, 0, 0.1], [2, 1, 0.1]]}})
    assert config.ruido.N == 2
    config = carregar_configuracao_estudo({"ruido": {"N": 2, "modes": [[1, 0, 0.1], [2, 1, 0.1]]}})
    assert config.ruido.N == 2


def test_n_explicito_divergente_dos_modos_recusado():
    with pytest.raises(ErroConfiguracao) as erro:
        carregar_configuracao_estudo({"ruido": {"N": 5, "modes": [[1, 0, 0.1], [2, 1, 0.1]]}})
    assert "N=5" in erro.value.mensagem


def test_campo_de_modos_soma_coeficientes():
    grade = obter_grade(4)
    campo = campo_de_modos(grade, [(1, 0, 1.0), (2, 1, 0.5), (1, 0, 0.25)])
    assert campo.psi[indice_modo(1, 0)] == pytest.approx(1.25)
    assert campo.psi[indice_modo(2, 1)] == pytest.approx(0.5)
    assert np.count_nonzero(campo.psi) == 2


def test_referencia_da_esfera_e_deterministica():
    config = _estudo(stochastic=True, paths=2)
    a = executar_referencia_esfera(config, 1)
    b = executar_referencia_esfera(config, 1)
    c = executar_referencia_esfera(config, 0)
    np.testing.assert_array_equal(a.final.psi, b.final.psi)
    assert not np.array_equal(a.final.psi, c.final.psi)


# --- estudo ---


@pytest.mark.asyncio
async def test_auto_consistencia_tem_erro_nulo():
    relatorio = await executar_estudo_convergencia(_estudo(auto_consistencia=True), max_trabalhadores=2)
    for resultado in relatorio.por_eps:
        assert resultado.erro_sup_l2 <= 1e-10
        assert resultado.erro_sup_dainv <= 1e-10
        assert resultado.energia_flutuacao_max == 0.0
    assert not relatorio.possui_falhas


@pytest.mark.asyncio
async def test_relatorio_independe_do_numero_de_trabalhadores():
    config = _estudo(stochastic=True, paths=2)
    um = await executar_estudo_convergencia(config, max_trabalhadores=1)
    tres = await executar_estudo_convergencia(config, max_trabalhadores=3)
    assert um.model_dump() == tres.model_dump()
    assert um.linhas_erro == tres.linhas_erro


@pytest.mark.asyncio
async def test_linhas_de_erro_cobrem_todas_as_celulas():
    config = _estudo()
    relatorio = await executar_estudo_convergencia(config)
    amostras = len(executar_referencia_esfera(config, 0).tempos)
    assert len(relatorio.linhas_erro) == len(EPS) * amostras
    assert set(relatorio.linhas_erro[0]) == {
        "eps",
        "path_id",
        "t",
        "err_l2",
        "err_dainv",
        "energy_sphere",
        "energy_mean",
        "energy_fluct",
    }
    assert all(r.metricas_consistentes for r in relatorio.por_eps)
    assert "linhas_erro" not in relatorio.model_dump()


@pytest.mark.asyncio
async def test_celula_com_falha_entra_no_relatorio(monkeypatch):
    original = orquestrador.executar_celula_casca

    def celula_instavel(config, eps, id_caminho):
        if eps == 0.1:
            raise ErroDivergencia("Estado não finito na casca.", 3)
        return original(config, eps, id_caminho)

    monkeypatch.setattr(orquestrador, "executar_celula_casca", celula_instavel)
    relatorio = await executar_estudo_convergencia(_estudo())
    assert relatorio.possui_falhas
    falho = next(r for r in relatorio.por_eps if r.eps == 0.1)
    assert falho.caminhos_ok == 0 and falho.erro_sup_l2 is None
    assert falho.falhas[0]["tipo"] == "ErroDivergencia"
    assert falho.falhas[0]["passo"] == 3
    assert not relatorio.erros_decrescentes
    assert relatorio.ajuste.pontos == 3


@pytest.mark.asyncio
async def test_referencia_com_falha_interrompe_o_estudo(monkeypatch):
    def referencia_quebrada(config, id_caminho):
        raise ErroDivergencia("Esfera divergiu.", 1)

    monkeypatch.setattr(orquestrador, "executar_referencia_esfera", referencia_quebrada)
    with pytest.raises(ErroConfiguracao):
        await executar_estudo_convergencia(_estudo())


@pytest.mark.lento
@pytest.mark.asyncio
async def test_varredura_de_aceitacao_converge():
    config = carregar_configuracao_estudo({"eps_list": EPS, "lmax": 10, "nr": 6, "t_final": 0.5, "dt": 1e-3})
    relatorio = await executar_estudo_convergencia(config, max_trabalhadores=4)
    erros = [r.erro_sup_l2 for r in relatorio.por_eps]
    assert all(b < a for a, b in zip(erros, erros[1:]))
    assert relatorio.erros_decrescentes
    assert relatorio.ajuste.taxa >= 0.5
    assert relatorio.ajuste.convergente
