# helpers_compartilhados/helpers.py
"""
Módulo de funções auxiliares compartilhadas.

Configuração de logging com limpeza de logs antigos, leitura da configuração
de ambiente (.env) e criação do diretório de saída dos estudos.
"""

import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

from dotenv import load_dotenv

from app.core.excecoes import ErroConfiguracao, ErroSimulacao

logger = logging.getLogger(__name__)

NIVEIS_LOG = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class ConfiguracaoAmbiente:
    """
    Configuração vinda do ambiente, de menor precedência que o arquivo de
    estudo e as flags do CLI.

    Attributes:
        diretorio_saida: Diretório padrão dos resultados.
        diretorio_logs: Diretório dos arquivos de log.
        num_trabalhadores: Células simultâneas no estudo de convergência.
        nivel_log: Nível mínimo do handler de console.
        dias_retencao_logs: Idade máxima dos arquivos de log mantidos.
    """

    diretorio_saida: Path = Path("resultados")
    diretorio_logs: Path = Path("logs")
    num_trabalhadores: int = 2
    nivel_log: str = "INFO"
    dias_retencao_logs: int = 7

    def __post_init__(self):
        self.diretorio_saida = Path(self.diretorio_saida)
        self.diretorio_logs = Path(self.diretorio_logs)
        self.nivel_log = self.nivel_log.upper()
        if self.num_trabalhadores < 1:
            raise ErroConfiguracao(f"CASCA_NUM_TRABALHADORES deve ser ≥ 1 (recebido {self.num_trabalhadores}).")
        if self.nivel_log not in NIVEIS_LOG:
            raise ErroConfiguracao(f"CASCA_NIVEL_LOG inválido: {self.nivel_log}. Opções: {', '.join(NIVEIS_LOG)}.")
        if self.dias_retencao_logs < 0:
            raise ErroConfiguracao("CASCA_DIAS_RETENCAO_LOGS não pode ser negativo.")


def carregar_configuracao_ambiente(arquivo_env: Path = Path(".env")) -> ConfiguracaoAmbiente:
    """
    Carrega o .env (se existir) e monta a configuração de ambiente.

    Raises:
        ErroConfiguracao: Valor inválido em alguma variável.

    Examples:
        >>> config = carregar_configuracao_ambiente()
        >>> config.num_trabalhadores
        2
    """
    if arquivo_env.exists():
        load_dotenv(arquivo_env)
    try:
        return ConfiguracaoAmbiente(
            diretorio_saida=Path(os.getenv("CASCA_DIRETORIO_SAIDA", "resultados")),
            diretorio_logs=Path(os.getenv("CASCA_DIRETORIO_LOGS", "logs")),
            num_trabalhadores=int(os.getenv("CASCA_NUM_TRABALHADORES", "2")),
            nivel_log=os.getenv("CASCA_NIVEL_LOG", "INFO"),
            dias_retencao_logs=int(os.getenv("CASCA_DIAS_RETENCAO_LOGS", "7")),
        )
    except ErroSimulacao:
        raise
    except Exception as e:
        raise ErroConfiguracao(f"Erro ao ler a configuração de ambiente: {e}", type(e).__name__) from e


def preparar_diretorio_saida(diretorio: Path) -> Path:
    """
    Cria o diretório de saída, se necessário.

    Raises:
        ErroConfiguracao: O caminho existe e não é um diretório.
    """
    diretorio = Path(diretorio)
    if diretorio.exists() and not diretorio.is_dir():
        raise ErroConfiguracao(f"'{diretorio}' existe e não é um diretório.", "NotADirectoryError")
    diretorio.mkdir(parents=True, exist_ok=True)
    return diretorio


def configurar_logging(
    nome_arquivo_log: str,
    diretorio_log: Path = Path("logs"),
    nivel: str = "INFO",
    dias_retencao: int = 7,
) -> None:
    """
    Configura o logging para a aplicação e limpa logs antigos.

    O arquivo recebe tudo a partir de DEBUG; o console recebe a partir de
    `nivel`.

    Args:
        nome_arquivo_log: O nome do arquivo de log (sem a extensão).
        diretorio_log: O diretório onde os logs serão salvos.
        nivel: Nível mínimo exibido no console.
        dias_retencao: Logs modificados há mais dias que isso são excluídos.

    Examples:
        >>> configurar_logging('estudos')
        # Cria logs/estudos.log e configura logging
    """
    _limpar_logs_antigos(diretorio_log, dias_retencao)
    diretorio_log.mkdir(parents=True, exist_ok=True)
    caminho_arquivo_log = diretorio_log / f"{nome_arquivo_log}.log"

    formato_log = "%(asctime)s - %(levelname)s - %(name)s - [%(funcName)s] - %(message)s"
    formatador = logging.Formatter(formato_log, datefmt="%d-%m-%Y %H:%M:%S")

    logger_raiz = logging.getLogger()
    logger_raiz.setLevel(logging.DEBUG)

    # Limpa quaisquer handlers existentes para evitar logs duplicados
    if logger_raiz.hasHandlers():
        logger_raiz.handlers.clear()

    file_handler = logging.FileHandler(caminho_arquivo_log, encoding="utf-8")
    file_handler.setFormatter(formatador)
    logger_raiz.addHandler(file_handler)

    stream_handler = logging.StreamHandler(sys.stdout)
    stream_handler.setFormatter(formatador)
    stream_handler.setLevel(getattr(logging, nivel.upper(), logging.INFO))
    logger_raiz.addHandler(stream_handler)

    logging.info(f"Logging configurado. Os logs serão salvos em: {caminho_arquivo_log}")


def _limpar_logs_antigos(diretorio_log: Path, dias: int = 7) -> None:
    """
    Exclui arquivos .log modificados há mais de `dias` dias.

    Examples:
        >>> _limpar_logs_antigos(Path("logs"), 30)
        # Remove logs com mais de 30 dias
    """
    if not diretorio_log.exists():
        return

    limite_tempo = datetime.now() - timedelta(days=dias)
    logging.debug(f"Verificando e limpando logs com mais de {dias} dias em '{diretorio_log}'...")

    for arquivo_log in diretorio_log.glob("*.log"):
        try:
            data_modificacao = datetime.fromtimestamp(arquivo_log.stat().st_mtime)
            if data_modificacao < limite_tempo:
                logging.warning(
                    f"Excluindo arquivo de log antigo: {arquivo_log.name} "
                    f"(modificado em {data_modificacao.strftime('%d-%m-%Y')})"
                )
                arquivo_log.unlink()
        except OSError as e:
            logging.error(f"Não foi possível excluir o arquivo de log '{arquivo_log.name}': {e}")
