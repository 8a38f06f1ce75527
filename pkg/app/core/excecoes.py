# app/core/excecoes.py
"""
Hierarquia de exceções do projeto.

Todas as exceções carregam a mensagem e o nome do tipo que originou o erro,
no mesmo formato usado pelos robôs (mensagem + tipo), para que o orquestrador
e o CLI possam registrar a causa original sem depender do traceback.
"""

from typing import Optional


class ErroSimulacao(Exception):
    """
    Exceção base de todas as falhas de simulação e verificação.

    Attributes:
        mensagem: Descrição legível do problema.
        tipo: Nome do tipo de erro de origem (ex.: 'ValueError') ou da categoria.
    """

    def __init__(self, mensagem: str, tipo: Optional[str] = None):
        self.mensagem = mensagem
        self.tipo = tipo or type(self).__name__
        super().__init__(mensagem)

    def para_dict(self) -> dict:
        """Representação padronizada usada nos relatórios."""
        return {"erro": self.mensagem, "tipo": self.tipo}


class ErroConfiguracao(ErroSimulacao):
    """Parâmetros inválidos ou incompatíveis (grade, geometria, estudo)."""


class ErroUso(ErroSimulacao):
    """Operação chamada com entrada do tipo errado."""


class ErroConsistencia(ErroSimulacao):
    """Entrada que viola uma condição exigida (contorno, geometria)."""


class ErroPersistencia(ErroSimulacao):
    """Falha de leitura ou escrita de campos, trajetórias e relatórios."""


class ErroDivergencia(ErroSimulacao):
    """
    Estado não finito detectado durante a integração temporal.

    Attributes:
        passo: Índice do passo em que o estado deixou de ser finito.
    """

    def __init__(self, mensagem: str, passo: int, tipo: Optional[str] = None):
        self.passo = passo
        super().__init__(mensagem, tipo)

    def para_dict(self) -> dict:
        dados = super().para_dict()
        dados["passo"] = self.passo
        return dados
