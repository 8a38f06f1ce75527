# app/core/base_casca.py
"""
Base de Galerkin da casca: potenciais toroidal e poloidal por grau l, com
expansão radial nos nós de Gauss–Legendre da geometria.

Tabela de linhas de contorno (condições livres u·n = 0 e curl u × n = 0 em
r = 1 e r = 1 + ε, traduzidas para os potenciais):

    toroidal  S:  S′ = 0                   (2 linhas)
    poloidal  Q:  Q = 0  e  Q″ = 0         (4 linhas)

A base de cada setor é o núcleo dessas linhas; massa e rigidez são montadas
numa quadratura radial mais fina e a decomposição generalizada K v = λ M v
produz uma base L²(Q_ε)-ortonormal de autofunções do operador de Stokes
A_ε = curl curl. O estado do solucionador vive nessa base, então

    ‖u‖²_{L²(Q_ε)} = Σ c²     e     ‖curl u‖² = Σ λ c².
"""

import functools
import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh, null_space
from scipy.special import roots_legendre

from app.core.excecoes import ErroConfiguracao
from app.ferramentas.operadores_casca import (
    CampoVetorialCasca,
    GeometriaCasca,
    campo_de_potenciais,
    perfil_flutuacao,
)
from app.ferramentas.operadores_esfera import (
    GradeEsfera,
    SolenoidalEspectral,
    autovalores_stokes,
    graus_e_ordens,
    indice_modo,
)

# Configura o logger para este módulo
logger = logging.getLogger(__name__)

NR_MINIMO_BASE = 5

Coeficientes = Tuple[np.ndarray, np.ndarray]


def _somente_leitura(*arrays: np.ndarray) -> None:
    for array in arrays:
        array.setflags(write=False)


@dataclass(frozen=True)
class BaseCasca:
    """
    Autobase de Stokes por potenciais para uma geometria fixa.

    Coeficientes são pares (c_T, c_P) com formas ((lmax+1)², nr − 2) e
    ((lmax+1)², nr − 4); a linha l = 0 é sempre nula.
    """

    geometria: GeometriaCasca

    def __post_init__(self):
        if self.geometria.nr < NR_MINIMO_BASE:
            raise ErroConfiguracao(
                f"A base da casca exige nr ≥ {NR_MINIMO_BASE} (recebido {self.geometria.nr}).",
                "NosRadiaisInsuficientes",
            )

    @property
    def grade(self) -> GradeEsfera:
        return self.geometria.grade

    @property
    def numero_toroidal(self) -> int:
        return self.geometria.nr - 2

    @property
    def numero_poloidal(self) -> int:
        return self.geometria.nr - 4

    # --- Montagem ---

    @functools.cached_property
    def _quadratura_fina(self) -> Dict[str, np.ndarray]:
        geo = self.geometria
        xi, pesos = roots_legendre(2 * geo.nr + 4)
        r = geo.r_de_xi(xi)
        interp = geo.interpolacao(r)
        return {
            "r": r,
            "w": 0.5 * geo.eps * pesos,
            "E": interp,
            "D": interp @ geo.matriz_diferenciacao,
            "DD": interp @ geo.matriz_diferenciacao @ geo.matriz_diferenciacao,
        }

    @functools.cached_property
    def linhas_contorno(self) -> Dict[str, np.ndarray]:
        """Linhas de contorno por setor, como na tabela do módulo."""
        geo = self.geometria
        paredes = geo.linhas_contorno
        D = geo.matriz_diferenciacao
        return {
            "toroidal": paredes @ D,
            "poloidal": np.vstack([paredes, paredes @ D @ D]),
        }

    def _formas(self, l: int) -> Dict[str, np.ndarray]:
        """Massa e rigidez nodais dos dois setores para o grau l."""
        q = self._quadratura_fina
        L = float(l * (l + 1))
        w = q["w"]
        E, D, DD = q["E"], q["D"], q["DD"]
        inv_r2 = 1.0 / q["r"] ** 2

        massa_radial = E.T @ (w[:, None] * E)
        gradiente = L**2 * E.T @ ((w * inv_r2)[:, None] * E) + L * D.T @ (w[:, None] * D)
        rot_poloidal = -DD + L * inv_r2[:, None] * E
        return {
            "massa_toroidal": L * massa_radial,
            "rigidez_toroidal": gradiente,
            "massa_poloidal": gradiente,
            "rigidez_poloidal": L * rot_poloidal.T @ (w[:, None] * rot_poloidal),
        }

    def _resolver_setor(self, nucleo: np.ndarray, massa: np.ndarray, rigidez: np.ndarray, l: int, setor: str):
        massa_red = nucleo.T @ massa @ nucleo
        rigidez_red = nucleo.T @ rigidez @ nucleo
        try:
            autovalores, vetores = eigh(0.5 * (rigidez_red + rigidez_red.T), 0.5 * (massa_red + massa_red.T))
        except (LinAlgError, ValueError) as e:
            raise ErroConfiguracao(
                f"Problema radial singular (setor {setor}, l={l}, ε={self.geometria.eps}): {e}",
                type(e).__name__,
            ) from e
        modos = nucleo @ vetores
        return autovalores, modos, massa @ modos

    @functools.cached_property
    def _setores(self) -> Dict[str, np.ndarray]:
        lmax = self.grade.lmax
        nr = self.geometria.nr
        nT, nP = self.numero_toroidal, self.numero_poloidal
        nucleo_T = null_space(self.linhas_contorno["toroidal"])
        nucleo_P = null_space(self.linhas_contorno["poloidal"])
        if nucleo_T.shape[1] != nT or nucleo_P.shape[1] != nP:
            raise ErroConfiguracao("Linhas de contorno com posto deficiente.", "ContornoDegenerado")

        tabelas = {
            "autovalores_T": np.zeros((lmax + 1, nT)),
            "modos_T": np.zeros((lmax + 1, nr, nT)),
            "duais_T": np.zeros((lmax + 1, nr, nT)),
            "autovalores_P": np.zeros((lmax + 1, nP)),
            "modos_P": np.zeros((lmax + 1, nr, nP)),
            "duais_P": np.zeros((lmax + 1, nr, nP)),
        }
        for l in range(1, lmax + 1):
            formas = self._formas(l)
            for setor, nucleo in (("T", nucleo_T), ("P", nucleo_P)):
                nome = "toroidal" if setor == "T" else "poloidal"
                autovalores, modos, duais = self._resolver_setor(
                    nucleo, formas[f"massa_{nome}"], formas[f"rigidez_{nome}"], l, nome
                )
                tabelas[f"autovalores_{setor}"][l] = autovalores
                tabelas[f"modos_{setor}"][l] = modos
                tabelas[f"duais_{setor}"][l] = duais

        graus, _ = graus_e_ordens(lmax)
        por_coeficiente = {f"{nome}_coef": tabela[graus] for nome, tabela in tabelas.items()}
        tabelas.update(por_coeficiente)
        _somente_leitura(*tabelas.values())
        logger.debug(
            f"Base da casca montada: ε={self.geometria.eps}, nr={nr}, lmax={lmax}, "
            f"λ_min toroidal={tabelas['autovalores_T'][1, 0]:.4e}"
        )
        return tabelas

    # --- Acesso ---

    @property
    def autovalores(self) -> Coeficientes:
        """Autovalores de A_ε por coeficiente, nas formas de (c_T, c_P)."""
        return self._setores["autovalores_T_coef"], self._setores["autovalores_P_coef"]

    def autovalores_grau(self, l: int) -> Coeficientes:
        return self._setores["autovalores_T"][l], self._setores["autovalores_P"][l]

    def modos_grau(self, l: int) -> Coeficientes:
        """Perfis radiais nodais (nr, n) dos dois setores no grau l."""
        return self._setores["modos_T"][l], self._setores["modos_P"][l]

    def zeros(self) -> Coeficientes:
        ncoef = self.grade.numero_coeficientes
        return np.zeros((ncoef, self.numero_toroidal)), np.zeros((ncoef, self.numero_poloidal))

    def modo(self, l: int, m: int, n: int = 0, setor: str = "toroidal", amplitude: float = 1.0) -> Coeficientes:
        """Coeficientes de uma única autofunção."""
        c_T, c_P = self.zeros()
        alvo = c_T if setor == "toroidal" else c_P
        alvo[indice_modo(l, m), n] = amplitude
        return c_T, c_P

    def residuo_contorno(self) -> float:
        """Maior resíduo das linhas de contorno sobre todos os perfis da base, relativo."""
        maior = 0.0
        for setor, chave in (("toroidal", "modos_T"), ("poloidal", "modos_P")):
            linhas = self.linhas_contorno[setor]
            modos = self._setores[chave][1:]
            escala = np.max(np.abs(linhas)) * max(float(np.max(np.abs(modos))), 1e-300)
            maior = max(maior, float(np.max(np.abs(np.einsum("bj,ljn->lbn", linhas, modos)))) / escala)
        return maior

    # --- Conversões ---

    def potenciais(self, c_T: np.ndarray, c_P: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Potenciais nodais S e Q, forma (nr, (lmax+1)²)."""
        S = np.einsum("kjn,kn->jk", self._setores["modos_T_coef"], c_T)
        Q = np.einsum("kjn,kn->jk", self._setores["modos_P_coef"], c_P)
        return S, Q

    def coeficientes_de_potenciais(self, S: np.ndarray, Q: np.ndarray) -> Coeficientes:
        """Projeção na energia: exata para potenciais no espaço da base."""
        c_T = np.einsum("kjn,jk->kn", self._setores["duais_T_coef"], S)
        c_P = np.einsum("kjn,jk->kn", self._setores["duais_P_coef"], Q)
        return c_T, c_P

    def sintetizar(self, c_T: np.ndarray, c_P: np.ndarray) -> CampoVetorialCasca:
        return campo_de_potenciais(self.geometria, *self.potenciais(c_T, c_P))

    def avaliar_potenciais(self, c_T: np.ndarray, c_P: np.ndarray, r: np.ndarray) -> Dict[str, np.ndarray]:
        """S, S′, Q, Q′ e Q″ avaliados em raios arbitrários, forma (len(r), (lmax+1)²)."""
        geo = self.geometria
        S, Q = self.potenciais(c_T, c_P)
        E = geo.interpolacao(r)
        D = geo.matriz_diferenciacao
        return {
            "S": E @ S,
            "dS": E @ (D @ S),
            "Q": E @ Q,
            "dQ": E @ (D @ Q),
            "d2Q": E @ (D @ (D @ Q)),
        }

    def projetar_valores(
        self,
        r: np.ndarray,
        pesos_dr: np.ndarray,
        grade: GradeEsfera,
        u_r: np.ndarray,
        u_lambda: np.ndarray,
        u_phi: np.ndarray,
    ) -> Coeficientes:
        """
        Produtos (w, φ_n) de um campo amostrado em (r, grade) contra a base.

        Toroidal: ∫ r S_n (w, curl′Y) dr. Poloidal: ∫ l(l+1) [Q_n a_r + r Q_n′ (w, grad′Y)/l(l+1)] dr.
        """
        geo = self.geometria
        L = autovalores_stokes(grade.lmax)
        chi, psi = grade.analisar_tangente(u_lambda, u_phi)
        a_r = grade.analisar_valores(u_r)
        E = geo.interpolacao(r)
        D = geo.matriz_diferenciacao
        perfis_T = np.einsum("qj,kjn->kqn", E, self._setores["modos_T_coef"])
        perfis_P = np.einsum("qj,kjn->kqn", E, self._setores["modos_P_coef"])
        derivadas_P = np.einsum("qj,ji,kin->kqn", E, D, self._setores["modos_P_coef"])

        c_T = np.einsum("q,kqn,qk->kn", pesos_dr * r, perfis_T, L * psi)
        c_P = np.einsum("q,kqn,qk->kn", pesos_dr, perfis_P, L * a_r) + np.einsum(
            "q,kqn,qk->kn", pesos_dr * r, derivadas_P, L * chi
        )
        return c_T, c_P

    def projetar(self, campo: CampoVetorialCasca) -> Coeficientes:
        """Projeção L²(Q_ε) de um campo na base, pela quadratura da geometria."""
        geo = self.geometria
        if campo.geometria != geo:
            raise ErroConfiguracao("Campo e base com geometrias diferentes.")
        return self.projetar_valores(geo.nos_radiais, geo.pesos_dr, geo.grade, *campo.componentes)

    # --- Normas e decomposição ---

    @staticmethod
    def energia(c_T: np.ndarray, c_P: np.ndarray) -> float:
        return float(np.sum(c_T**2) + np.sum(c_P**2))

    def energia_rotacional(self, c_T: np.ndarray, c_P: np.ndarray) -> float:
        lam_T, lam_P = self.autovalores
        return float(np.sum(lam_T * c_T**2) + np.sum(lam_P * c_P**2))

    def traco(self, c_T: np.ndarray) -> SolenoidalEspectral:
        """α = M̊_ε u como corrente na esfera: α = (1/ε) ∫ S dr."""
        geo = self.geometria
        S = np.einsum("kjn,kn->jk", self._setores["modos_T_coef"], c_T)
        return SolenoidalEspectral(self.grade, geo.pesos_dr @ S / geo.eps)

    def retrair_coeficientes(self, u: SolenoidalEspectral) -> np.ndarray:
        """c_T de R̊_ε u: potencial toroidal S = ψ constante em r."""
        if u.grade != self.grade:
            raise ErroConfiguracao("Campo da esfera fora da grade da base.")
        S = np.broadcast_to(u.psi, (self.geometria.nr, u.psi.size))
        return np.einsum("kjn,jk->kn", self._setores["duais_T_coef"], S)

    def partes(self, c_T: np.ndarray, c_P: np.ndarray) -> Tuple[Coeficientes, Coeficientes]:
        """((média), (flutuação)) em coeficientes; a parte poloidal é toda flutuação."""
        media_T = self.retrair_coeficientes(self.traco(c_T))
        zeros_P = np.zeros_like(c_P)
        return (media_T, zeros_P), (c_T - media_T, c_P)

    def coeficientes_poluicao(self, g: SolenoidalEspectral) -> np.ndarray:
        """c_T do campo toroidal q(r)·g de média nula."""
        perfil = perfil_flutuacao(self.geometria)[:, None]
        return np.einsum("kjn,jk->kn", self._setores["duais_T_coef"], perfil * g.psi[None, :])

    def coeficientes_aleatorios(self, rng: np.random.Generator, decaimento: float = 1.0) -> Coeficientes:
        graus, _ = graus_e_ordens(self.grade.lmax)
        amplitude = np.where(graus >= 1, (1.0 + graus) ** (-decaimento), 0.0)[:, None]
        c_T, c_P = self.zeros()
        c_T = amplitude * rng.standard_normal(c_T.shape)
        c_P = amplitude * rng.standard_normal(c_P.shape)
        return c_T, c_P


@functools.lru_cache(maxsize=16)
def obter_base(geometria: GeometriaCasca) -> BaseCasca:
    base = BaseCasca(geometria)
    base._setores  # monta as tabelas uma única vez por geometria
    return base
