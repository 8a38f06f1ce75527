# tests/test_persistencia.py

import json

import numpy as np
import pytest

from app.core.excecoes import ErroPersistencia
from app.core.orquestrador import AjusteTaxa, RelatorioConvergencia, ResultadoEps
from app.db.persistencia import (
    COLUNAS_ERROS,
    carregar_campo,
    carregar_json,
    ler_csv,
    salvar_campo,
    salvar_csv,
    salvar_json,
    salvar_relatorio,
)
from app.ferramentas.operadores_casca import GeometriaCasca, campo_solenoidal_aleatorio
from app.ferramentas.operadores_esfera import (
    CampoEscalarEsfera,
    SolenoidalEspectral,
    coeficientes_aleatorios,
)


def test_campo_espectral_ida_e_volta(tmp_path, grade, rng):
    u = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1))
    caminho = salvar_campo(u, tmp_path / "campos" / "u.bin")
    lido = carregar_campo(caminho)
    assert isinstance(lido, SolenoidalEspectral)
    assert lido.grade == grade
    np.testing.assert_array_equal(lido.psi, u.psi)


def test_campo_da_casca_preserva_geometria(tmp_path, geometria_fina, rng):
    u = campo_solenoidal_aleatorio(geometria_fina, rng)
    lido = carregar_campo(salvar_campo(u, tmp_path / "casca.bin"))
    assert lido.geometria == geometria_fina
    for a, b in zip(lido.componentes, u.componentes):
        np.testing.assert_array_equal(a, b)


def test_cabecalho_descreve_o_payload(tmp_path, grade):
    caminho = salvar_campo(CampoEscalarEsfera(grade, np.ones(grade.forma)), tmp_path / "phi.bin")
    linha, payload = caminho.read_bytes().split(b"\n", 1)
    cabecalho = json.loads(linha)
    assert cabecalho["kind"] == "CampoEscalarEsfera"
    assert cabecalho["shape"] == list(grade.forma)
    assert len(payload) == 8 * grade.forma[0] * grade.forma[1]


def test_payload_truncado(tmp_path, grade):
    caminho = salvar_campo(SolenoidalEspectral.modo(grade, 1, 0), tmp_path / "u.bin")
    caminho.write_bytes(caminho.read_bytes()[:-8])
    with pytest.raises(ErroPersistencia) as erro:
        carregar_campo(caminho)
    assert erro.value.tipo == "PayloadTruncado"


def test_cabecalho_invalido(tmp_path):
    caminho = tmp_path / "lixo.bin"
    caminho.write_bytes(b"nao e json\n\x00\x00")
    with pytest.raises(ErroPersistencia):
        carregar_campo(caminho)


def test_tipo_desconhecido(tmp_path):
    caminho = tmp_path / "x.bin"
    caminho.write_bytes(b'{"kind":"Outro","lmax":2,"nlat":4,"nlon":8,"shape":[1]}\n' + np.zeros(1).tobytes())
    with pytest.raises(ErroPersistencia) as erro:
        carregar_campo(caminho)
    assert erro.value.tipo == "TipoInvalido"


def test_arquivo_ausente(tmp_path):
    with pytest.raises(ErroPersistencia) as erro:
        carregar_campo(tmp_path / "nao_existe.bin")
    assert erro.value.tipo == "FileNotFoundError"


def test_csv_preserva_floats(tmp_path):
    linhas = [{"t": 0.1, "valor": 1 / 3}, {"t": 0.2, "valor": 2e-17}]
    caminho = salvar_csv(linhas, tmp_path / "serie.csv")
    lido = ler_csv(caminho)
    assert [float(l["valor"]) for l in lido] == [1 / 3, 2e-17]
    assert caminho.read_text(encoding="utf-8").splitlines()[0] == "t,valor"


def test_csv_vazio_com_colunas(tmp_path):
    caminho = salvar_csv([], tmp_path / "vazio.csv", COLUNAS_ERROS)
    assert caminho.read_text(encoding="utf-8").strip() == ",".join(COLUNAS_ERROS)


def test_json_deterministico(tmp_path):
    a = salvar_json({"b": 1, "a": [1.5, 2]}, tmp_path / "a.json")
    b = salvar_json({"a": [1.5, 2], "b": 1}, tmp_path / "b.json")
    assert a.read_bytes() == b.read_bytes()
    assert carregar_json(a) == {"a": [1.5, 2], "b": 1}


def test_json_recusa_nan(tmp_path):
    with pytest.raises(ErroPersistencia):
        salvar_json({"valor": float("nan")}, tmp_path / "nan.json")


def test_carregar_json_exige_objeto(tmp_path):
    caminho = tmp_path / "lista.json"
    caminho.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ErroPersistencia) as erro:
        carregar_json(caminho)
    assert erro.value.tipo == "FormatoInvalido"
    with pytest.raises(ErroPersistencia):
        carregar_json(tmp_path / "ausente.json")


def test_salvar_relatorio(tmp_path):
    linha = {coluna: 0.0 for coluna in COLUNAS_ERROS}
    relatorio = RelatorioConvergencia(
        configuracao={"eps_list": [0.4, 0.2, 0.1]},
        metadados={"semente": 0},
        por_eps=[ResultadoEps(eps=0.4, caminhos_ok=1, erro_sup_l2=0.1)],
        ajuste=AjusteTaxa(pontos=1, aviso="Ajuste pulado."),
        ajuste_integrado=AjusteTaxa(pontos=1),
        erros_decrescentes=True,
        linhas_erro=[linha, linha],
    )
    caminhos = salvar_relatorio(relatorio, tmp_path / "saida")
    assert caminhos["relatorio"].name == "report.json"
    dados = carregar_json(caminhos["relatorio"])
    assert dados["por_eps"][0]["erro_sup_l2"] == 0.1
    assert "linhas_erro" not in dados
    assert len(ler_csv(caminhos["erros"])) == 2
    assert caminhos["erros"].read_text(encoding="utf-8").splitlines()[0] == ",".join(COLUNAS_ERROS)
