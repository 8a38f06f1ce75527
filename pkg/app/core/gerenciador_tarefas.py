# app/core/gerenciador_tarefas.py
"""
Gerenciador de tarefas assíncronas para as células (ε, id_caminho) de um
estudo.

Cada célula é uma função pura executada em thread (`asyncio.to_thread`), com
concorrência limitada por semáforo. Os resultados são indexados pela chave da
célula, então a ordem de conclusão nunca afeta a agregação.
"""

import asyncio
import logging
from typing import Any, Callable, Dict, Hashable, Optional, Set

from app.core.excecoes import ErroSimulacao

# Configura o logger para este módulo
logger = logging.getLogger(__name__)


class GerenciadorTarefas:
    """
    Controle centralizado das tarefas de um estudo.

    Attributes:
        tarefas: Conjunto de tarefas em execução.
        max_trabalhadores: Número máximo de células simultâneas.
        concluidas: Total de células finalizadas com sucesso.
        falhas: Total de células que terminaram em erro.
    """

    def __init__(self, max_trabalhadores: int = 2):
        """
        Args:
            max_trabalhadores: Número máximo de células em execução simultânea.

        Examples:
            >>> gerenciador = GerenciadorTarefas(max_trabalhadores=4)
            >>> gerenciador.max_trabalhadores
            4
        """
        if max_trabalhadores < 1:
            raise ValueError("max_trabalhadores deve ser ≥ 1")
        self.tarefas: Set[asyncio.Task] = set()
        self.max_trabalhadores = max_trabalhadores
        self.concluidas = 0
        self.falhas = 0
        self._lock = asyncio.Lock()
        self._semaforo: Optional[asyncio.Semaphore] = None

    def _obter_semaforo(self) -> asyncio.Semaphore:
        # criado sob demanda para pertencer ao laço de eventos em uso
        if self._semaforo is None:
            self._semaforo = asyncio.Semaphore(self.max_trabalhadores)
        return self._semaforo

    async def _executar_celula(self, chave: Hashable, funcao: Callable[[], Any]) -> Dict[str, Any]:
        async with self._obter_semaforo():
            logger.debug(f"Iniciando célula {chave}")
            try:
                dados = await asyncio.to_thread(funcao)
                self.concluidas += 1
                return {"dados": dados, "erro": None}
            except ErroSimulacao as e:
                self.falhas += 1
                logger.error(f"Célula {chave} falhou: {e.mensagem}", exc_info=True)
                return {"dados": None, "erro": e.para_dict()}
            except Exception as e:
                self.falhas += 1
                logger.error(f"Erro inesperado na célula {chave}: {e}", exc_info=True)
                return {"dados": None, "erro": {"erro": str(e), "tipo": type(e).__name__}}

    async def adicionar_tarefa(self, chave: Hashable, funcao: Callable[[], Any]) -> asyncio.Task:
        """
        Agenda e rastreia uma célula.

        Returns:
            asyncio.Task: Tarefa cujo resultado é {'dados': ..., 'erro': ...}.
        """
        async with self._lock:
            self.limpar_finalizadas()
            tarefa = asyncio.create_task(self._executar_celula(chave, funcao), name=str(chave))
            self.tarefas.add(tarefa)
            tarefa.add_done_callback(self._remover_tarefa)
            logger.debug(f"Tarefa {chave} adicionada. Total em execução: {len(self.tarefas)}")
            return tarefa

    def _remover_tarefa(self, tarefa: asyncio.Task) -> None:
        self.tarefas.discard(tarefa)
        if tarefa.done() and not tarefa.cancelled() and tarefa.exception():
            logger.error(f"Tarefa {tarefa.get_name()} falhou com exceção: {tarefa.exception()}")

    def limpar_finalizadas(self) -> None:
        finalizadas = {tarefa for tarefa in self.tarefas if tarefa.done()}
        self.tarefas -= finalizadas
        if finalizadas:
            logger.debug(f"Removidas {len(finalizadas)} tarefas finalizadas")

    async def executar_celulas(self, celulas: Dict[Hashable, Callable[[], Any]]) -> Dict[Hashable, Dict[str, Any]]:
        """
        Executa todas as células e devolve os resultados por chave.

        Args:
            celulas: Mapa chave -> função sem argumentos.

        Returns:
            Dicionário chave -> {'dados': ..., 'erro': ...}, com as chaves em
            ordem crescente.

        Examples:
            >>> resultados = await gerenciador.executar_celulas({(0.1, 0): lambda: 42})
            >>> resultados[(0.1, 0)]["dados"]
            42
        """
        chaves = sorted(celulas)
        tarefas = [await self.adicionar_tarefa(chave, celulas[chave]) for chave in chaves]
        resultados = await asyncio.gather(*tarefas)
        return dict(zip(chaves, resultados))

    def obter_estatisticas(self) -> Dict[str, Any]:
        """
        Examples:
            >>> gerenciador.obter_estatisticas()["max_permitido"]
            2
        """
        self.limpar_finalizadas()
        return {
            "em_execucao": len(self.tarefas),
            "max_permitido": self.max_trabalhadores,
            "concluidas": self.concluidas,
            "falhas": self.falhas,
        }
