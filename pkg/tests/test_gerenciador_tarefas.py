# tests/test_gerenciador_tarefas.py

import asyncio
import threading
import time

import pytest

from app.core.excecoes import ErroDivergencia
from app.core.gerenciador_tarefas import GerenciadorTarefas


def test_recusa_zero_trabalhadores():
    with pytest.raises(ValueError):
        GerenciadorTarefas(max_trabalhadores=0)


@pytest.mark.asyncio
async def test_resultados_ordenados_por_chave():
    gerenciador = GerenciadorTarefas(max_trabalhadores=3)
    celulas = {(0.1, 1): lambda: "b", (0.05, 0): lambda: "a", (0.4, 0): lambda: "c"}
    resultados = await gerenciador.executar_celulas(celulas)
    assert list(resultados) == [(0.05, 0), (0.1, 1), (0.4, 0)]
    assert [r["dados"] for r in resultados.values()] == ["a", "b", "c"]
    assert all(r["erro"] is None for r in resultados.values())


@pytest.mark.asyncio
async def test_celula_com_falha_nao_interrompe_as_demais():
    def diverge():
        raise ErroDivergencia("Estado não finito.", 7)

    def quebra():
        raise RuntimeError("inesperado")

    gerenciador = GerenciadorTarefas(max_trabalhadores=2)
    resultados = await gerenciador.executar_celulas({0: lambda: 1, 1: diverge, 2: quebra, 3: lambda: 4})
    assert resultados[0]["dados"] == 1 and resultados[3]["dados"] == 4
    assert resultados[1]["erro"]["tipo"] == "ErroDivergencia"
    assert resultados[1]["erro"]["passo"] == 7
    assert resultados[2]["erro"] == {"erro": "inesperado", "tipo": "RuntimeError"}

    estatisticas = gerenciador.obter_estatisticas()
    assert estatisticas == {"em_execucao": 0, "max_permitido": 2, "concluidas": 2, "falhas": 2}


@pytest.mark.asyncio
async def test_concorrencia_limitada():
    ativos = 0
    maximo = 0
    trava = threading.Lock()

    def celula():
        nonlocal ativos, maximo
        with trava:
            ativos += 1
            maximo = max(maximo, ativos)
        time.sleep(0.02)
        with trava:
            ativos -= 1
        return True

    gerenciador = GerenciadorTarefas(max_trabalhadores=2)
    resultados = await gerenciador.executar_celulas({k: celula for k in range(6)})
    assert all(r["dados"] for r in resultados.values())
    assert 1 <= maximo <= 2


@pytest.mark.asyncio
async def test_executar_celulas_nao_deixa_tarefas_pendentes():
    gerenciador = GerenciadorTarefas(max_trabalhadores=2)
    evento = threading.Event()

    def lenta():
        return evento.wait(1.0)

    execucao = asyncio.create_task(gerenciador.executar_celulas({0: lenta, 1: lenta, 2: lambda: True}))
    await asyncio.sleep(0.05)
    assert not execucao.done()
    evento.set()
    resultados = await execucao
    assert all(r["dados"] for r in resultados.values())
    estatisticas = gerenciador.obter_estatisticas()
    assert estatisticas["em_execucao"] == 0
    assert estatisticas["concluidas"] == 3
