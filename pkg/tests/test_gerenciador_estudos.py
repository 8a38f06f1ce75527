# tests/test_gerenciador_estudos.py

import json
from pathlib import Path

import pytest

import gerenciador_estudos
from gerenciador_estudos import (
    SAIDA_CONFIGURACAO,
    SAIDA_SUCESSO,
    main,
    montar_configuracao,
    montar_parser,
)
from helpers_compartilhados.helpers import ConfiguracaoAmbiente

PEQUENO = ["--lmax", "3", "--nr", "6", "--dt", "1e-3", "--t-final", "0.01"]


@pytest.fixture
def ambiente_cli(tmp_path, monkeypatch, handlers_restaurados):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("CASCA_DIRETORIO_LOGS", str(tmp_path / "logs"))
    monkeypatch.setenv("CASCA_DIRETORIO_SAIDA", str(tmp_path / "saida"))
    monkeypatch.delenv("CASCA_NUM_TRABALHADORES", raising=False)
    monkeypatch.delenv("CASCA_NIVEL_LOG", raising=False)
    return tmp_path


def test_parser_normaliza_flags():
    args = montar_parser().parse_args(
        ["converge", "--eps-list", "0.4,0.2", "--mode", "nse", "--trabalhadores", "3"]
    )
    assert args.comando == "converge"
    assert args.eps_list == [0.4, 0.2]
    assert args.mode == "NSE"
    assert args.trabalhadores == 3
    assert args.stochastic is None and args.lmax is None


def test_parser_recusa_lista_de_eps_malformada():
    with pytest.raises(SystemExit):
        montar_parser().parse_args(["sphere", "--eps-list", "0.4,abc"])


def test_flags_sobrescrevem_arquivo(tmp_path):
    arquivo = tmp_path / "estudo.json"
    arquivo.write_text(json.dumps({"lmax": 5, "nu": 0.2, "eps_list": [0.3, 0.1, 0.05]}), encoding="utf-8")
    args = montar_parser().parse_args(["sphere", "--config", str(arquivo), "--lmax", "6"])
    config = montar_configuracao(args, ConfiguracaoAmbiente(diretorio_saida=tmp_path / "saida"))
    assert config.lmax == 6
    assert config.nu == 0.2
    assert config.lista_eps == [0.3, 0.1, 0.05]
    assert Path(config.saida) == tmp_path / "saida"


@pytest.mark.asyncio
@pytest.mark.parametrize(
    "argv",
    [
        ["sphere", "--eps-list", "0.6,0.3"],
        ["check", "--seletor", "magia"],
        ["sphere", "--config", "nao_existe.json"],
        ["shell", "--nr", "3"],
    ],
)
async def test_erros_de_uso_saem_com_codigo_2(ambiente_cli, argv):
    assert await main(argv) == SAIDA_CONFIGURACAO


@pytest.mark.asyncio
async def test_execucao_na_esfera(ambiente_cli):
    saida = ambiente_cli / "esfera"
    assert await main(["sphere", *PEQUENO, "--out", str(saida)]) == SAIDA_SUCESSO
    assert (saida / "sphere.csv").exists()
    assert (saida / "sphere_final.bin").exists()
    assert (ambiente_cli / "logs" / "estudos.log").exists()


@pytest.mark.asyncio
async def test_execucao_na_casca(ambiente_cli):
    assert await main(["shell", *PEQUENO, "--eps-list", "0.2"]) == SAIDA_SUCESSO
    saida = ambiente_cli / "saida"
    for nome in ("shell_eps_0.2.csv", "shell_eps_0.2_final.bin", "shell_eps_0.2_alpha.bin"):
        assert (saida / nome).exists(), nome


@pytest.mark.asyncio
async def test_convergencia_grava_relatorio(ambiente_cli):
    saida = ambiente_cli / "conv"
    codigo = await main(["converge", *PEQUENO, "--eps-list", "0.4,0.2,0.1", "--out", str(saida)])
    assert codigo == SAIDA_SUCESSO
    relatorio = json.loads((saida / "report.json").read_text(encoding="utf-8"))
    assert [r["eps"] for r in relatorio["por_eps"]] == [0.4, 0.2, 0.1]
    assert (saida / "errors.csv").exists()


@pytest.mark.asyncio
async def test_check_grava_suite(ambiente_cli):
    codigo = await main(["check", "--seletor", "poincare", "--casos", "4"])
    assert codigo == SAIDA_SUCESSO
    dados = json.loads((ambiente_cli / "saida" / "suite.json").read_text(encoding="utf-8"))
    assert [v["nome"] for v in dados["verificacoes"]] == ["poincare_eps_0.4"]


@pytest.mark.asyncio
async def test_falha_na_celula_sai_com_codigo_1(ambiente_cli, monkeypatch):
    from app.core.excecoes import ErroDivergencia

    def celula_quebrada(config, eps, id_caminho):
        raise ErroDivergencia("Estado não finito na casca.", 2)

    monkeypatch.setattr(gerenciador_estudos, "executar_celula_casca", celula_quebrada)
    assert await main(["shell", *PEQUENO]) == gerenciador_estudos.SAIDA_FALHA
