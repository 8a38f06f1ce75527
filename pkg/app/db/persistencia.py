# app/db/persistencia.py
"""
Persistência de campos, trajetórias e relatórios.

Campos usam um arquivo por campo: a primeira linha é um cabeçalho JSON
compacto terminado em '\\n' e o restante é o payload float64 little-endian em
ordem row-major (componente vetorial mais lento, depois o eixo radial, depois
λ e φ). Toda operação de arquivo passa por `_gerenciar_arquivo`, que registra
e converte falhas em ErroPersistencia.
"""

import csv
import json
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np

from app.core.excecoes import ErroPersistencia, ErroSimulacao
from app.ferramentas.operadores_casca import CampoEscalarCasca, CampoVetorialCasca, GeometriaCasca
from app.ferramentas.operadores_esfera import (
    CampoEscalarEsfera,
    CampoTangenteEsfera,
    EscalarEspectral,
    SolenoidalEspectral,
    obter_grade,
)

# Configura o logger para este módulo
logger = logging.getLogger(__name__)

TIPO_PAYLOAD = np.dtype("<f8")

COLUNAS_ERROS = ["eps", "path_id", "t", "err_l2", "err_dainv", "energy_sphere", "energy_mean", "energy_fluct"]

Campo = Union[
    EscalarEspectral,
    SolenoidalEspectral,
    CampoEscalarEsfera,
    CampoTangenteEsfera,
    CampoEscalarCasca,
    CampoVetorialCasca,
]


@contextmanager
def _gerenciar_arquivo(caminho: Path, modo: str, **kwargs) -> Iterator[Any]:
    """
    Abre o arquivo e garante o fechamento, mesmo em caso de erros.

    Raises:
        ErroPersistencia: Qualquer falha de E/S ou de formato dentro do bloco.
    """
    arquivo = None
    try:
        if "w" in modo:
            caminho.parent.mkdir(parents=True, exist_ok=True)
        arquivo = open(caminho, modo, **kwargs)
        logger.debug(f"Arquivo '{caminho}' aberto em modo '{modo}'.")
        yield arquivo
    except ErroSimulacao:
        raise
    except Exception as e:
        logger.error(f"Erro ao acessar '{caminho}': {e}", exc_info=True)
        raise ErroPersistencia(f"Erro na operação de arquivo '{caminho}': {e}", type(e).__name__) from e
    finally:
        if arquivo:
            arquivo.close()


def _cabecalho_e_payload(campo: Campo) -> Tuple[Dict[str, Any], np.ndarray]:
    if isinstance(campo, (CampoEscalarCasca, CampoVetorialCasca)):
        geo = campo.geometria
        grade = geo.grade
        extra = {"eps": geo.eps, "nr": geo.nr}
    else:
        grade = campo.grade
        extra = {}

    if isinstance(campo, EscalarEspectral):
        tipo, dados = "EscalarEspectral", campo.coeficientes
    elif isinstance(campo, SolenoidalEspectral):
        tipo, dados = "SolenoidalEspectral", campo.psi
    elif isinstance(campo, CampoEscalarEsfera):
        tipo, dados = "CampoEscalarEsfera", campo.valores
    elif isinstance(campo, CampoTangenteEsfera):
        tipo, dados = "CampoTangenteEsfera", np.stack([campo.u_lambda, campo.u_phi])
    elif isinstance(campo, CampoEscalarCasca):
        tipo, dados = "CampoEscalarCasca", campo.valores
    elif isinstance(campo, CampoVetorialCasca):
        tipo, dados = "CampoVetorialCasca", np.stack(campo.componentes)
    else:
        raise ErroPersistencia(f"Tipo de campo não serializável: {type(campo).__name__}.", "TipoInvalido")

    cabecalho = {"kind": tipo, "lmax": grade.lmax, "nlat": grade.nlat, "nlon": grade.nlon, "shape": list(dados.shape)}
    cabecalho.update(extra)
    return cabecalho, np.ascontiguousarray(dados, dtype=TIPO_PAYLOAD)


def salvar_campo(campo: Campo, caminho: Path) -> Path:
    """
    Grava um campo no formato cabeçalho JSON + payload binário.

    Examples:
        >>> salvar_campo(SolenoidalEspectral.modo(obter_grade(4), 1, 0), Path("u0.bin"))
        PosixPath('u0.bin')
    """
    cabecalho, payload = _cabecalho_e_payload(campo)
    caminho = Path(caminho)
    with _gerenciar_arquivo(caminho, "wb") as arquivo:
        arquivo.write(json.dumps(cabecalho, sort_keys=True, separators=(",", ":")).encode("utf-8") + b"\n")
        arquivo.write(payload.tobytes(order="C"))
    logger.info(f"Campo {cabecalho['kind']} salvo em '{caminho}'")
    return caminho


def carregar_campo(caminho: Path) -> Campo:
    """
    Lê um campo gravado por `salvar_campo`.

    Raises:
        ErroPersistencia: Cabeçalho inválido, tipo desconhecido ou payload truncado.
    """
    caminho = Path(caminho)
    with _gerenciar_arquivo(caminho, "rb") as arquivo:
        linha = arquivo.readline()
        bruto = arquivo.read()
        try:
            cabecalho = json.loads(linha.decode("utf-8"))
            forma = tuple(cabecalho["shape"])
            grade = obter_grade(cabecalho["lmax"], cabecalho["nlat"], cabecalho["nlon"])
        except (ValueError, KeyError, TypeError) as e:
            raise ErroPersistencia(f"Cabeçalho inválido em '{caminho}': {e}", type(e).__name__) from e

        esperado = int(np.prod(forma)) * TIPO_PAYLOAD.itemsize
        if len(bruto) != esperado:
            raise ErroPersistencia(
                f"Payload de '{caminho}' com {len(bruto)} bytes; esperado {esperado}.", "PayloadTruncado"
            )
        dados = np.frombuffer(bruto, dtype=TIPO_PAYLOAD).reshape(forma).astype(float)

        tipo = cabecalho["kind"]
        if tipo == "EscalarEspectral":
            return EscalarEspectral(grade, dados)
        if tipo == "SolenoidalEspectral":
            return SolenoidalEspectral(grade, dados)
        if tipo == "CampoEscalarEsfera":
            return CampoEscalarEsfera(grade, dados)
        if tipo == "CampoTangenteEsfera":
            return CampoTangenteEsfera(grade, dados[0], dados[1])
        if tipo in ("CampoEscalarCasca", "CampoVetorialCasca"):
            geometria = GeometriaCasca(float(cabecalho["eps"]), int(cabecalho["nr"]), grade)
            if tipo == "CampoEscalarCasca":
                return CampoEscalarCasca(geometria, dados)
            return CampoVetorialCasca(geometria, dados[0], dados[1], dados[2])
        raise ErroPersistencia(f"Tipo de campo desconhecido '{tipo}' em '{caminho}'.", "TipoInvalido")


def salvar_csv(linhas: Sequence[Dict[str, Any]], caminho: Path, colunas: Sequence[str] = ()) -> Path:
    """Grava linhas (dicionários) em CSV; as colunas vêm da primeira linha se não informadas."""
    caminho = Path(caminho)
    colunas = list(colunas) or (list(linhas[0].keys()) if linhas else [])
    with _gerenciar_arquivo(caminho, "w", newline="", encoding="utf-8") as arquivo:
        escritor = csv.DictWriter(arquivo, fieldnames=colunas, lineterminator="\n")
        escritor.writeheader()
        for linha in linhas:
            escritor.writerow({coluna: _formatar(linha.get(coluna)) for coluna in colunas})
    logger.info(f"{len(linhas)} linhas gravadas em '{caminho}'")
    return caminho


def _formatar(valor: Any) -> Any:
    if isinstance(valor, (float, np.floating)):
        return repr(float(valor))
    return valor


def ler_csv(caminho: Path) -> List[Dict[str, str]]:
    with _gerenciar_arquivo(Path(caminho), "r", newline="", encoding="utf-8") as arquivo:
        return list(csv.DictReader(arquivo))


def salvar_json(dados: Dict[str, Any], caminho: Path) -> Path:
    """JSON com chaves ordenadas e indentação 2: mesma entrada, mesmos bytes."""
    caminho = Path(caminho)
    with _gerenciar_arquivo(caminho, "w", encoding="utf-8") as arquivo:
        arquivo.write(json.dumps(dados, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False))
        arquivo.write("\n")
    logger.info(f"JSON gravado em '{caminho}'")
    return caminho


def carregar_json(caminho: Path) -> Dict[str, Any]:
    """
    Raises:
        ErroPersistencia: Arquivo ausente, JSON inválido ou raiz que não é objeto.
    """
    caminho = Path(caminho)
    with _gerenciar_arquivo(caminho, "r", encoding="utf-8") as arquivo:
        dados = json.load(arquivo)
        if not isinstance(dados, dict):
            raise ErroPersistencia(f"'{caminho}' deve conter um objeto JSON.", "FormatoInvalido")
        return dados


def salvar_relatorio(relatorio, diretorio: Path) -> Dict[str, Path]:
    """
    Grava report.json e errors.csv de um RelatorioConvergencia.

    Returns:
        Caminhos gravados por nome lógico.
    """
    diretorio = Path(diretorio)
    return {
        "relatorio": salvar_json(relatorio.model_dump(mode="json"), diretorio / "report.json"),
        "erros": salvar_csv(relatorio.linhas_erro, diretorio / "errors.csv", COLUNAS_ERROS),
    }
