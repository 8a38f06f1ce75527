# app/ferramentas/ruido.py
"""
Ruído aditivo de dimensão finita: modelos na esfera, caminhos de Wiener
reprodutíveis e a elevação do ruído para a casca.

Cada incremento é endereçado por (semente, id_caminho, j, k): a coluna j do
caminho vem de um gerador Philox próprio, semeado com
SeedSequence([semente, id_caminho, j]), e k é a posição na coluna. Assim a
mesma tupla produz o mesmo número independentemente da ordem de execução ou
do número de trabalhadores.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.excecoes import ErroConfiguracao, ErroUso
from app.ferramentas.operadores_casca import (
    CampoVetorialCasca,
    GeometriaCasca,
    TipoRetracao,
    campo_de_potenciais,
    norma_casca,
    perfil_flutuacao,
    retrair,
)
from app.ferramentas.operadores_esfera import (
    GradeEsfera,
    SolenoidalEspectral,
    TipoNorma,
    norma,
)

# Configura o logger para este módulo
logger = logging.getLogger(__name__)

# Limite de incrementos por caminho (N × passos) antes de recusar a alocação
LIMITE_INCREMENTOS = 2**27

Modulacao = Callable[[float], float]


def _modulacao_constante(t: float) -> float:
    return 1.0


@dataclass(frozen=True, eq=False)
class ModeloRuido:
    """
    Ruído G(t) dW = m(t) Σ_j g^j dβ_j na esfera.

    Attributes:
        grade: Grade dos campos g^j.
        campos: Campos g^j em V(S²), sem modo l = 0.
        modulacao: Fator escalar m(t); None equivale a 1.
        limite_m: Cota M em ∫₀ᵀ ‖G(t)‖²_{L₂} dt ≤ M, conferida sob demanda.
    """

    grade: GradeEsfera
    campos: Tuple[SolenoidalEspectral, ...]
    modulacao: Optional[Modulacao] = None
    limite_m: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "campos", tuple(self.campos))
        for j, campo in enumerate(self.campos):
            if campo.grade != self.grade:
                raise ErroConfiguracao(f"Campo de ruído {j} fora da grade do modelo.")
            if campo.possui_modo_medio:
                raise ErroConfiguracao(f"Campo de ruído {j} possui componente l = 0.")

    @property
    def N(self) -> int:
        return len(self.campos)

    def fator(self, t: float) -> float:
        return float((self.modulacao or _modulacao_constante)(t))

    def matriz(self) -> np.ndarray:
        """Coeficientes de corrente empilhados, forma (N, (lmax+1)²)."""
        if not self.campos:
            return np.zeros((0, self.grade.numero_coeficientes))
        return np.stack([campo.psi for campo in self.campos])

    @classmethod
    def de_modos(
        cls,
        grade: GradeEsfera,
        modos: Iterable[Tuple[int, int, float]],
        modulacao: Optional[Modulacao] = None,
        limite_m: Optional[float] = None,
    ) -> "ModeloRuido":
        """Um campo g^j = amp · curl′Y_{l,m} para cada (l, m, amp)."""
        campos = [SolenoidalEspectral.modo(grade, l, m, amp) for l, m, amp in modos]
        return cls(grade, tuple(campos), modulacao, limite_m)

    @classmethod
    def padrao(cls, grade: GradeEsfera, N: int = 3, amplitude: float = 0.1) -> "ModeloRuido":
        """N modos de baixo grau (l = 1, 2, ...) com amplitude normalizada em L²."""
        modos: List[Tuple[int, int, float]] = []
        l = 1
        while len(modos) < N:
            if l > grade.lmax:
                raise ErroConfiguracao(f"lmax={grade.lmax} não comporta {N} modos de ruído.")
            for m in range(-l, l + 1):
                if len(modos) == N:
                    break
                modos.append((l, m, amplitude / np.sqrt(l * (l + 1))))
            l += 1
        return cls.de_modos(grade, modos)

    def integral_hs(self, t_final: float, dt: float) -> float:
        """∫₀ᵀ m(t)² Σ‖g^j‖² dt pela regra do ponto à esquerda."""
        passos = int(round(t_final / dt))
        tempos = np.arange(passos) * dt
        fatores = np.array([self.fator(t) for t in tempos]) ** 2
        return float(np.sum(fatores) * dt * norma_hs(self, EspacoRuido.H_ESFERA) ** 2)

    def verificar_limite(self, t_final: float, dt: float) -> float:
        """
        Confere a cota de Hilbert–Schmidt do modelo.

        Raises:
            ErroConfiguracao: Integral acima de limite_m.
        """
        integral = self.integral_hs(t_final, dt)
        if self.limite_m is not None and integral > self.limite_m:
            raise ErroConfiguracao(
                f"∫‖G‖²_HS = {integral:.4e} excede a cota M = {self.limite_m:.4e}.", "CotaRuido"
            )
        return integral


@dataclass(frozen=True, eq=False)
class CaminhoWiener:
    """Incrementos ΔW[k, j] de um caminho, com dt fixo."""

    semente: int
    id_caminho: int
    dt: float
    incrementos: np.ndarray

    def __post_init__(self):
        incrementos = np.array(self.incrementos, dtype=float)
        if incrementos.ndim != 2:
            raise ErroConfiguracao("Incrementos devem formar uma tabela (passos, N).")
        incrementos.setflags(write=False)
        object.__setattr__(self, "incrementos", incrementos)

    @property
    def N(self) -> int:
        return self.incrementos.shape[1]

    @property
    def passos(self) -> int:
        return self.incrementos.shape[0]

    def incremento(self, k: int) -> np.ndarray:
        return self.incrementos[k]


def _gerador(semente: int, id_caminho: int, j: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([semente, id_caminho, j])))


def amostrar_caminho(semente: int, id_caminho: int, N: int, dt: float, passos: int) -> CaminhoWiener:
    """
    Amostra ΔW[k, j] ~ N(0, dt) de forma reprodutível.

    Args:
        semente: Semente global (inteiro ≥ 0).
        id_caminho: Índice do caminho (inteiro ≥ 0).
        N: Número de movimentos brownianos; N = 0 gera tabela vazia.
        dt: Passo de tempo (> 0).
        passos: Número de incrementos por movimento.

    Returns:
        CaminhoWiener com tabela (passos, N).

    Raises:
        ErroConfiguracao: dt ≤ 0, índices negativos ou tabela grande demais.

    Examples:
        >>> a = amostrar_caminho(7, 0, 2, 0.01, 5)
        >>> b = amostrar_caminho(7, 0, 2, 0.01, 5)
        >>> bool((a.incrementos == b.incrementos).all())
        True
    """
    if dt <= 0:
        raise ErroConfiguracao(f"dt deve ser positivo (recebido {dt}).")
    if semente < 0 or id_caminho < 0 or N < 0 or passos < 0:
        raise ErroConfiguracao("semente, id_caminho, N e passos devem ser não negativos.")
    if N * passos > LIMITE_INCREMENTOS:
        raise ErroConfiguracao(
            f"Tabela de incrementos com {N}×{passos} entradas excede o limite {LIMITE_INCREMENTOS}.",
            "TabelaGrandeDemais",
        )

    raiz_dt = np.sqrt(dt)
    incrementos = np.zeros((passos, N))
    for j in range(N):
        incrementos[:, j] = _gerador(semente, id_caminho, j).standard_normal(passos) * raiz_dt
    logger.debug(f"Caminho {id_caminho} (semente {semente}): {passos} passos, N={N}")
    return CaminhoWiener(semente, id_caminho, dt, incrementos)


# --- Ruído na casca ---


@dataclass(frozen=True, eq=False)
class RuidoCasca:
    """Campos g̃^j em H_ε e a mesma modulação do modelo de origem."""

    geometria: GeometriaCasca
    campos: Tuple[CampoVetorialCasca, ...]
    modulacao: Optional[Modulacao] = None

    @property
    def N(self) -> int:
        return len(self.campos)

    def fator(self, t: float) -> float:
        return float((self.modulacao or _modulacao_constante)(t))


def campo_poluicao(g: SolenoidalEspectral, geometria: GeometriaCasca) -> CampoVetorialCasca:
    """Campo toroidal de potencial q(r)·g, com média M̊_ε nula."""
    perfil = perfil_flutuacao(geometria)[:, None]
    return campo_de_potenciais(geometria, perfil * g.psi[None, :])


def elevar_ruido(modelo: ModeloRuido, geometria: GeometriaCasca, poluicao: bool = False) -> RuidoCasca:
    """
    Eleva o ruído da esfera para a casca: g̃^j = R̊_ε g^j (+ ε·η^j se poluído).

    A poluição η^j = campo_poluicao(g^j) tem norma O(1) e média nula, então
    ‖g̃^j‖² continua O(ε) e as hipóteses de escala do ruído seguem válidas.

    Raises:
        ErroConfiguracao: Grade do modelo diferente da grade da geometria.
    """
    if modelo.grade != geometria.grade:
        raise ErroConfiguracao("Grade do modelo de ruído difere da grade da casca.")
    campos = []
    for g in modelo.campos:
        campo = retrair(TipoRetracao.R_ANEL, g, geometria)
        if poluicao:
            campo = campo + geometria.eps * campo_poluicao(g, geometria)
        campos.append(campo)
    logger.debug(f"Ruído elevado para ε={geometria.eps}: N={len(campos)}, poluição={poluicao}")
    return RuidoCasca(geometria, tuple(campos), modelo.modulacao)


class EspacoRuido(str, Enum):
    H_ESFERA = "H_S2"
    H_EPS = "H_EPS"


def norma_hs(
    conjunto: Union[ModeloRuido, RuidoCasca, Sequence], espaco: EspacoRuido = EspacoRuido.H_ESFERA
) -> float:
    """
    Norma de Hilbert–Schmidt (Σ_j ‖g^j‖²)^{1/2} no espaço indicado.

    Raises:
        ErroUso: Campos incompatíveis com o espaço pedido.
    """
    espaco = EspacoRuido(espaco)
    campos = conjunto.campos if isinstance(conjunto, (ModeloRuido, RuidoCasca)) else tuple(conjunto)
    total = 0.0
    for campo in campos:
        if espaco is EspacoRuido.H_ESFERA:
            if not isinstance(campo, SolenoidalEspectral):
                raise ErroUso("H_S2 exige campos SolenoidalEspectral.", "TipoEntradaInvalido")
            total += norma(campo, TipoNorma.L2) ** 2
        else:
            if not isinstance(campo, CampoVetorialCasca):
                raise ErroUso("H_EPS exige campos CampoVetorialCasca.", "TipoEntradaInvalido")
            total += norma_casca(campo) ** 2
    return float(np.sqrt(total))


def verificar_limite_coeficientes(ruido: RuidoCasca, t_final: float, dt: float) -> float:
    """
    Razão ε⁻¹ ∫₀ᵀ ‖G̃_ε‖²_HS dt, que deve permanecer limitada quando ε → 0.
    """
    passos = int(round(t_final / dt))
    fatores = np.array([ruido.fator(k * dt) for k in range(passos)]) ** 2
    integral = float(np.sum(fatores) * dt * norma_hs(ruido, EspacoRuido.H_EPS) ** 2)
    return integral / ruido.geometria.eps


def momentos_escalonados(ruido: RuidoCasca, p: float, t_final: float, dt: float) -> np.ndarray:
    """
    ε^{−p/2} ∫₀ᵀ ‖g̃^j(t)‖^p dt para cada j.

    Para ruído elevado R̊_ε g + O(ε) esses valores ficam limitados em ε.
    """
    if p < 2:
        raise ErroUso(f"Momento p={p} deve ser ≥ 2.")
    passos = int(round(t_final / dt))
    fatores = np.abs(np.array([ruido.fator(k * dt) for k in range(passos)])) ** p
    normas = np.array([norma_casca(campo) for campo in ruido.campos])
    return np.sum(fatores) * dt * normas**p / ruido.geometria.eps ** (p / 2)
